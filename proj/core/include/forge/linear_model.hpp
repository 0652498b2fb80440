#pragma once

#include <span>
#include <vector>

#include "forge/matrix.hpp"

namespace forge::model {

/// Per-feature location and scale fitted on training rows.
struct Standardizer {
  std::vector<double> mean;   // all zero when not centering
  std::vector<double> scale;  // standard deviation, or root mean square without centering
  bool centered = true;

  static Standardizer fit(const Matrix& x, bool center);
  Matrix apply(const Matrix& x) const;
};

/// Linear model in original feature units: y = intercept + x . coefficients.
struct LinearModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
  bool fit_intercept = true;
  double alpha = 0.0;  // ridge strength, 0 for OLS
  Standardizer standardizer;

  double predict(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;
};

/// Least squares via column-pivoted QR on standardized features.
/// Throws SingularSystem on rank deficiency or a constant feature.
LinearModel fit_ols(const Matrix& x, std::span<const double> y, bool fit_intercept = true);

/// Minimizes |y - b0 - X b|^2 + alpha |b|^2 over standardized features with an
/// unpenalized intercept. Requires alpha > 0.
LinearModel fit_ridge(const Matrix& x, std::span<const double> y, double alpha);

}  // namespace forge::model
