#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace forge::stats {

/// Mean absolute percentage error over pairs whose actual value is non-zero.
struct ZeroExcludedMape {
  double value = 0.0;  // fraction, 0.1 == 10%
  std::size_t pairs_used = 0;
  std::size_t pairs_dropped_zero = 0;
};

/// Throws AllActualsZero when every actual is zero.
ZeroExcludedMape zero_excluded_mape(std::span<const double> actual, std::span<const double> predicted);

/// nullopt for fewer than 3 pairs or zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks with ties averaged.
std::vector<double> fractional_ranks(std::span<const double> values);

enum class CorrelationMethod { pearson, spearman };

std::string_view to_string(CorrelationMethod method) noexcept;
std::optional<CorrelationMethod> correlation_from_string(std::string_view name) noexcept;

/// |coefficient| with undefined treated as 0.
double correlation_strength(CorrelationMethod method, std::span<const double> x, std::span<const double> y);

/// Stable 64-bit seed from a base seed and a sequence of labels.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> parts) noexcept;

/// Portable deterministic generator (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;
  /// Uniform integer in [0, bound).
  std::size_t below(std::size_t bound) noexcept;
  /// Uniform double in [0, 1).
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by `rng`.
void shuffle(std::vector<std::size_t>& values, Rng& rng) noexcept;

}  // namespace forge::stats
