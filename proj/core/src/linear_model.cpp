#include "forge/linear_model.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "forge/error.hpp"

namespace forge::model {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
  }
  return out;
}

std::vector<double> select(std::span<const double> values, std::span<const std::size_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (const auto i : indices) out.push_back(values[i]);
  return out;
}

Standardizer Standardizer::fit(const Matrix& x, bool center) {
  Standardizer s;
  s.centered = center;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 0.0);
  const auto n = static_cast<double>(x.rows());
  if (x.rows() == 0) return s;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double m = 0.0;
    if (center) {
      for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
      m /= n;
    }
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - m) * (x(r, c) - m);
    s.mean[c] = m;
    s.scale[c] = std::sqrt(ss / n);
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double sc = scale[c] > 0.0 ? scale[c] : 1.0;
      out(r, c) = (x(r, c) - mean[c]) / sc;
    }
  }
  return out;
}

double LinearModel::predict(std::span<const double> row) const {
  double y = intercept;
  for (std::size_t c = 0; c < coefficients.size(); ++c) y += coefficients[c] * row[c];
  return y;
}

std::vector<double> LinearModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  }
  return out;
}

void check_shape(const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw Error(ErrorKind::InsufficientRows, "design matrix and target disagree or are empty");
  }
}

/// Maps coefficients on standardized features back to original units.
void unstandardize(LinearModel& model, const Eigen::VectorXd& beta, double intercept_std) {
  const auto& s = model.standardizer;
  model.coefficients.assign(beta.size(), 0.0);
  double shift = 0.0;
  for (Eigen::Index c = 0; c < beta.size(); ++c) {
    const double sc = s.scale[c] > 0.0 ? s.scale[c] : 1.0;
    model.coefficients[c] = beta[c] / sc;
    shift += model.coefficients[c] * s.mean[c];
  }
  model.intercept = intercept_std - shift;
}

}  // namespace

LinearModel fit_ols(const Matrix& x, std::span<const double> y, bool fit_intercept) {
  check_shape(x, y);
  LinearModel model;
  model.fit_intercept = fit_intercept;
  model.standardizer = Standardizer::fit(x, fit_intercept);
  for (const double sc : model.standardizer.scale) {
    if (!(sc > 0.0)) throw Error(ErrorKind::SingularSystem, "constant feature");
  }

  const auto z = to_eigen(model.standardizer.apply(x));
  const auto k = z.cols() + (fit_intercept ? 1 : 0);
  if (static_cast<Eigen::Index>(x.rows()) < k) throw Error(ErrorKind::SingularSystem, "fewer rows than parameters");
  Eigen::MatrixXd a(z.rows(), k);
  a.leftCols(z.cols()) = z;
  if (fit_intercept) a.col(k - 1).setOnes();
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), static_cast<Eigen::Index>(y.size()));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) throw Error(ErrorKind::SingularSystem, "rank-deficient design matrix");
  const Eigen::VectorXd solution = qr.solve(target);
  unstandardize(model, solution.head(z.cols()), fit_intercept ? solution[k - 1] : 0.0);
  return model;
}

LinearModel fit_ridge(const Matrix& x, std::span<const double> y, double alpha) {
  check_shape(x, y);
  if (!(alpha > 0.0)) throw Error(ErrorKind::ConfigInvalid, "ridge alpha must be positive");
  LinearModel model;
  model.alpha = alpha;
  model.standardizer = Standardizer::fit(x, true);

  const auto z = to_eigen(model.standardizer.apply(x));
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), static_cast<Eigen::Index>(y.size()));
  const double y_mean = target.mean();
  const Eigen::VectorXd yc = target.array() - y_mean;

  Eigen::MatrixXd gram = z.transpose() * z;
  gram.diagonal().array() += alpha;
  const Eigen::VectorXd beta = gram.ldlt().solve(z.transpose() * yc);
  unstandardize(model, beta, y_mean);
  return model;
}

}  // namespace forge::model
