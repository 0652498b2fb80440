#include "forge/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "forge/error.hpp"
#include "forge/statistics.hpp"

namespace forge::model {

Split train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InsufficientRows, "split needs at least two rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  stats::Rng rng(seed);
  stats::shuffle(order, rng);
  auto test_n = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  test_n = std::clamp<std::size_t>(test_n, 1, n - 1);
  Split out;
  out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_n));
  out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_n), order.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

std::vector<Split> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || n < 2 * k) {
    throw Error(ErrorKind::InsufficientRows,
                std::to_string(k) + " folds need at least " + std::to_string(2 * k) + " rows, have " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  stats::Rng rng(seed);
  stats::shuffle(order, rng);
  std::vector<Split> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    const auto begin = f * n / k;
    const auto end = (f + 1) * n / k;
    for (std::size_t i = 0; i < n; ++i) {
      (i >= begin && i < end ? folds[f].test : folds[f].train).push_back(order[i]);
    }
    std::sort(folds[f].test.begin(), folds[f].test.end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

namespace {

std::vector<std::size_t> map_rows(std::span<const std::size_t> positions, std::span<const std::size_t> ids) {
  if (ids.empty()) return {positions.begin(), positions.end()};
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (const auto p : positions) out.push_back(ids[p]);
  return out;
}

}  // namespace

GridResult grid_search_cv(std::size_t grid_size, const Fitter& fitter, const Matrix& x, std::span<const double> y,
                          std::size_t folds, std::uint64_t seed, const CvContext* context) {
  if (grid_size == 0) throw Error(ErrorKind::ConfigInvalid, "empty parameter grid");
  const auto splits = kfold(x.rows(), folds, seed);
  GridResult result;
  result.scores.assign(grid_size, std::numeric_limits<double>::quiet_NaN());
  bool any = false;
  for (std::size_t g = 0; g < grid_size; ++g) {
    double total = 0.0;
    std::size_t scored = 0;
    for (const auto& split : splits) {
      const auto x_train = x.select_rows(split.train);
      const auto y_train = select(y, split.train);
      Fitted fitted;
      try {
        fitted = fitter(x_train, y_train, g);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::SingularSystem) continue;
        throw;
      }
      if (context && context->observer && *context->observer) {
        auto record = context->record;
        record.purpose = "cv";
        record.train_rows = map_rows(split.train, context->row_ids);
        record.test_rows = map_rows(split.test, context->row_ids);
        if (fitted.standardizer) {
          record.standardized = true;
          record.centered = fitted.standardizer->centered;
          record.feature_mean = fitted.standardizer->mean;
          record.feature_scale = fitted.standardizer->scale;
        }
        (*context->observer)(record);
      }
      const auto predictions = fitted.predict(x.select_rows(split.test));
      const auto actual = select(y, split.test);
      try {
        total += stats::zero_excluded_mape(actual, predictions).value;
        ++scored;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::AllActualsZero) throw;
      }
    }
    if (scored == 0) continue;
    result.scores[g] = total / static_cast<double>(scored);
    if (!any || result.scores[g] < result.best_score) {
      result.best_index = g;
      result.best_score = result.scores[g];
      any = true;
    }
  }
  if (!any) throw Error(ErrorKind::AllFoldsUnassessable, "no grid point could be scored");
  return result;
}

namespace {

Fitted wrap(LinearModel model) {
  Fitted out;
  out.standardizer = model.standardizer;
  out.predict = [model](const Matrix& x) { return model.predict(x); };
  out.linear = std::move(model);
  return out;
}

}  // namespace

Fitter ols_fitter() {
  return [](const Matrix& x, std::span<const double> y, std::size_t index) {
    return wrap(fit_ols(x, y, index == 0));
  };
}

Fitter ridge_fitter(std::vector<double> alphas) {
  return [alphas = std::move(alphas)](const Matrix& x, std::span<const double> y, std::size_t index) {
    return wrap(fit_ridge(x, y, alphas.at(index)));
  };
}

}  // namespace forge::model
