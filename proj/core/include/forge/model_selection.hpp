#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge/linear_model.hpp"
#include "forge/matrix.hpp"

namespace forge::model {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffled split of positions 0..n-1; the test side gets round(n * test_fraction), at least 1.
Split train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);

/// Shuffled k-fold partition of 0..n-1. Throws InsufficientRows when a fold
/// would hold fewer than two rows.
std::vector<Split> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

/// One fitted model as seen by the leakage audit. Row ids are table rows.
struct FitRecord {
  std::string stage;
  std::string target;
  std::string purpose;  // "cv", "final" or "importance"
  std::vector<std::string> features;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  bool standardized = false;
  bool centered = false;
};

using FitObserver = std::function<void(const FitRecord&)>;

/// A fitted model reduced to what cross-validation needs.
struct Fitted {
  std::function<std::vector<double>(const Matrix&)> predict;
  std::optional<Standardizer> standardizer;
  std::optional<LinearModel> linear;
};

/// Fits grid point `index` on the given rows.
using Fitter = std::function<Fitted(const Matrix& x, std::span<const double> y, std::size_t index)>;

struct GridResult {
  std::size_t best_index = 0;
  double best_score = 0.0;
  std::vector<double> scores;  // NaN where every fold was unassessable
};

struct CvContext {
  std::span<const std::size_t> row_ids;  // table row of each x row; empty: positions
  FitRecord record;                     // stage/target/features prefilled
  const FitObserver* observer = nullptr;
};

/// Exhaustive grid, k-fold CV scored by mean zero-excluded MAPE; ties go to
/// the earlier grid point. Fold fits that throw SingularSystem or produce an
/// all-zero fold are unassessable. Throws AllFoldsUnassessable if no grid
/// point can be scored.
GridResult grid_search_cv(std::size_t grid_size, const Fitter& fitter, const Matrix& x, std::span<const double> y,
                          std::size_t folds, std::uint64_t seed, const CvContext* context = nullptr);

Fitter ols_fitter();                                   // grid: {intercept on, intercept off}
Fitter ridge_fitter(std::vector<double> alphas);       // grid: alphas

}  // namespace forge::model
