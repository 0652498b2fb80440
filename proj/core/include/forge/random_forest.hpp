#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "forge/matrix.hpp"

namespace forge::model {

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // per split; 0: all
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
};

class RegressionTree {
 public:
  /// CART on the given sample (row indices may repeat). Adds the impurity
  /// decrease of every split to `importance`.
  static RegressionTree fit(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
                            const ForestParams& params, std::uint64_t seed, std::vector<double>& importance);

  double predict(std::span<const double> row) const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t depth() const noexcept;

 private:
  std::vector<TreeNode> nodes_;
};

class RandomForest {
 public:
  static RandomForest fit(const Matrix& x, std::span<const double> y, const ForestParams& params);

  double predict(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;

  /// Total impurity decrease per feature, normalized to sum to 1 (all zero when no split happened).
  const std::vector<double>& importances() const noexcept { return importances_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
  std::vector<double> importances_;
};

}  // namespace forge::model
