#include "forge/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forge/error.hpp"

namespace forge::stats {

ZeroExcludedMape zero_excluded_mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size() || actual.empty()) {
    throw Error(ErrorKind::InsufficientRows, "MAPE needs equal, non-empty inputs");
  }
  ZeroExcludedMape out;
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) {
      ++out.pairs_dropped_zero;
      continue;
    }
    total += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    ++out.pairs_used;
  }
  if (out.pairs_used == 0) throw Error(ErrorKind::AllActualsZero, "every actual value is zero");
  out.value = total / static_cast<double>(out.pairs_used);
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = std::min(x.size(), y.size());
  if (n < 3) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  const auto n = std::min(x.size(), y.size());
  const auto rx = fractional_ranks(x.first(n));
  const auto ry = fractional_ranks(y.first(n));
  return pearson(rx, ry);
}

std::string_view to_string(CorrelationMethod method) noexcept {
  return method == CorrelationMethod::pearson ? "pearson" : "spearman";
}

std::optional<CorrelationMethod> correlation_from_string(std::string_view name) noexcept {
  if (name == "pearson") return CorrelationMethod::pearson;
  if (name == "spearman") return CorrelationMethod::spearman;
  return std::nullopt;
}

double correlation_strength(CorrelationMethod method, std::span<const double> x, std::span<const double> y) {
  const auto r = method == CorrelationMethod::pearson ? pearson(x, y) : spearman(x, y);
  return r ? std::abs(*r) : 0.0;
}

namespace {

std::uint64_t splitmix(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> parts) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (int shift = 0; shift < 64; shift += 8) mix(static_cast<unsigned char>(base >> shift));
  for (const auto part : parts) {
    for (const char c : part) mix(static_cast<unsigned char>(c));
    mix(0x1f);
  }
  return splitmix(h);
}

std::uint64_t Rng::next() noexcept { return splitmix(state_); }

std::size_t Rng::below(std::size_t bound) noexcept {
  if (bound == 0) return 0;
  // Modulo bias is negligible for the bounds used here.
  return static_cast<std::size_t>(next() % bound);
}

double Rng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

void shuffle(std::vector<std::size_t>& values, Rng& rng) noexcept {
  for (std::size_t i = values.size(); i > 1; --i) std::swap(values[i - 1], values[rng.below(i)]);
}

}  // namespace forge::stats
