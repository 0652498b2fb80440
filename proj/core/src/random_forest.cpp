#include "forge/random_forest.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "forge/error.hpp"
#include "forge/statistics.hpp"

namespace forge::model {
namespace {

struct Pending {
  std::uint32_t node;
  std::size_t lo;
  std::size_t hi;
  std::size_t depth;
};

struct SplitChoice {
  int feature = -1;
  std::size_t position = 0;  // left side is [lo, position)
  double threshold = 0.0;
  double gain = 0.0;
};

}  // namespace

RegressionTree RegressionTree::fit(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
                                   const ForestParams& params, std::uint64_t seed, std::vector<double>& importance) {
  RegressionTree tree;
  const std::size_t m = sample.size();
  const std::size_t p = x.cols();
  if (m == 0) throw Error(ErrorKind::InsufficientRows, "empty tree sample");
  importance.resize(p, 0.0);

  // order[f] holds sample positions sorted by feature f; every node owns the
  // same [lo, hi) range in each of them.
  std::vector<std::vector<std::uint32_t>> order(p, std::vector<std::uint32_t>(m));
  for (std::size_t f = 0; f < p; ++f) {
    auto& o = order[f];
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(), [&](auto a, auto b) { return x(sample[a], f) < x(sample[b], f); });
  }
  std::vector<double> ys(m);
  for (std::size_t i = 0; i < m; ++i) ys[i] = y[sample[i]];

  stats::Rng rng(seed);
  std::vector<std::size_t> features(p);
  std::iota(features.begin(), features.end(), std::size_t{0});
  const std::size_t per_split = params.max_features == 0 ? p : std::min(params.max_features, p);
  const std::size_t leaf_min = std::max<std::size_t>(1, params.min_samples_leaf);

  std::vector<char> goes_left(m, 0);

  tree.nodes_.push_back(TreeNode{});
  std::vector<Pending> stack{{0, 0, m, 0}};
  while (!stack.empty()) {
    const auto job = stack.back();
    stack.pop_back();
    const auto n = job.hi - job.lo;

    double sum = 0.0;
    for (std::size_t i = job.lo; i < job.hi; ++i) sum += ys[order[0][i]];
    const double mean = sum / static_cast<double>(n);
    tree.nodes_[job.node].value = mean;

    bool constant = true;
    for (std::size_t i = job.lo + 1; i < job.hi && constant; ++i) constant = ys[order[0][i]] == ys[order[0][job.lo]];
    const bool depth_ok = params.max_depth == 0 || job.depth < params.max_depth;
    if (constant || !depth_ok || n < params.min_samples_split || n < 2 * leaf_min) continue;

    if (per_split < p) {
      // Partial Fisher-Yates: the first `per_split` entries are the draw.
      for (std::size_t i = 0; i < per_split; ++i) std::swap(features[i], features[i + rng.below(p - i)]);
    }

    SplitChoice best;
    const double parent_term = sum * sum / static_cast<double>(n);
    for (std::size_t k = 0; k < per_split; ++k) {
      const auto f = features[k];
      const auto& o = order[f];
      double left_sum = 0.0;
      for (std::size_t i = job.lo; i + 1 < job.hi; ++i) {
        left_sum += ys[o[i]];
        const std::size_t nl = i + 1 - job.lo;
        const std::size_t nr = n - nl;
        if (nl < leaf_min || nr < leaf_min) continue;
        const double a = x(sample[o[i]], f);
        const double b = x(sample[o[i + 1]], f);
        if (!(a < b)) continue;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent_term;
        if (gain > best.gain + 1e-12 * (1.0 + std::abs(best.gain))) {
          best = SplitChoice{static_cast<int>(f), i + 1, a + (b - a) / 2.0, gain};
        }
      }
    }
    if (best.feature < 0) continue;

    importance[best.feature] += best.gain;
    const auto& chosen = order[best.feature];
    for (std::size_t i = job.lo; i < job.hi; ++i) goes_left[chosen[i]] = i < best.position ? 1 : 0;
    for (std::size_t f = 0; f < p; ++f) {
      auto& o = order[f];
      std::stable_partition(o.begin() + job.lo, o.begin() + job.hi, [&](std::uint32_t s) { return goes_left[s] != 0; });
    }

    const auto left = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.nodes_.push_back(TreeNode{});
    const auto right = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.nodes_.push_back(TreeNode{});
    auto& node = tree.nodes_[job.node];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    stack.push_back({right, best.position, job.hi, job.depth + 1});
    stack.push_back({left, job.lo, best.position, job.depth + 1});
  }
  return tree;
}

double RegressionTree::predict(std::span<const double> row) const {
  std::uint32_t i = 0;
  while (nodes_[i].feature >= 0) i = row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].value;
}

std::size_t RegressionTree::depth() const noexcept {
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return deepest;
}

RandomForest RandomForest::fit(const Matrix& x, std::span<const double> y, const ForestParams& params) {
  if (x.rows() != y.size() || x.rows() == 0) throw Error(ErrorKind::InsufficientRows, "forest needs rows");
  if (params.trees == 0) throw Error(ErrorKind::ConfigInvalid, "forest needs at least one tree");
  RandomForest forest;
  forest.importances_.assign(x.cols(), 0.0);
  std::vector<std::size_t> sample(x.rows());
  for (std::size_t t = 0; t < params.trees; ++t) {
    const auto seed = stats::derive_seed(params.seed, {"tree", std::to_string(t)});
    stats::Rng rng(seed);
    if (params.bootstrap) {
      for (auto& s : sample) s = rng.below(x.rows());
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    forest.trees_.push_back(RegressionTree::fit(x, y, sample, params, rng.next(), forest.importances_));
  }
  const double total = std::accumulate(forest.importances_.begin(), forest.importances_.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : forest.importances_) v /= total;
  }
  return forest;
}

double RandomForest::predict(std::span<const double> row) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(row);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> RandomForest::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

}  // namespace forge::model
