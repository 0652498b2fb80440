#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "forge/error.hpp"
#include "forge/linear_model.hpp"
#include "synthetic.hpp"

using namespace forge;
using namespace forge::model;
namespace oracle = forge::synth::oracle;

namespace {

struct Problem {
  Matrix x;
  std::vector<double> y;
};

Problem random_problem(std::uint64_t seed, std::size_t n, std::size_t p) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Problem out{Matrix(n, p), std::vector<double>(n)};
  std::vector<double> beta(p);
  for (auto& b : beta) b = 3.0 * g(rng);
  for (std::size_t r = 0; r < n; ++r) {
    double y = 7.0;
    for (std::size_t c = 0; c < p; ++c) {
      out.x(r, c) = 10.0 * g(rng) + static_cast<double>(c);
      y += beta[c] * out.x(r, c);
    }
    out.y[r] = y + g(rng);
  }
  return out;
}

}  // namespace

TEST(Ols, MatchesNormalEquations) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pr = random_problem(seed, 40 + seed, 1 + seed % 5);
    for (const bool intercept : {true, false}) {
      const auto m = fit_ols(pr.x, pr.y, intercept);
      const auto b = oracle::normal_equation_ols(pr.x, pr.y, intercept);
      const std::size_t off = intercept ? 1 : 0;
      EXPECT_NEAR(m.intercept, intercept ? b[0] : 0.0, 1e-8);
      for (std::size_t c = 0; c < m.coefficients.size(); ++c) EXPECT_NEAR(m.coefficients[c], b[c + off], 1e-8);
    }
  }
}

TEST(Ols, ExactLineRecovered) {
  Matrix x(5, 1);
  std::vector<double> y(5);
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = static_cast<double>(i + 1);
    y[i] = 2.0 + 3.0 * x(i, 0);
  }
  const auto m = fit_ols(x, y);
  EXPECT_NEAR(m.intercept, 2.0, 1e-12);
  EXPECT_NEAR(m.coefficients[0], 3.0, 1e-12);
  const double row[] = {10.0};
  EXPECT_NEAR(m.predict(row), 32.0, 1e-10);
}

TEST(Ols, SingularSystems) {
  Matrix x(4, 2);
  std::vector<double> y{1, 2, 3, 4};
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 2.0 * static_cast<double>(i);  // collinear
  }
  auto expect_singular = [&](const Matrix& m, std::span<const double> t) {
    try {
      fit_ols(m, t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SingularSystem);
    }
  };
  expect_singular(x, y);
  Matrix constant(4, 1);
  for (std::size_t i = 0; i < 4; ++i) constant(i, 0) = 5.0;
  expect_singular(constant, y);
  Matrix tiny(1, 1);
  tiny(0, 0) = 1.0;
  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_ols(tiny, one), Error);
}

TEST(Ridge, MatchesAugmentedLeastSquares) {
  // Ridge on standardized features equals OLS on data augmented with sqrt(alpha) I.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pr = random_problem(100 + seed, 30, 4);
    const double alpha = 0.5 * static_cast<double>(seed);
    const std::size_t n = pr.x.rows(), p = pr.x.cols();
    std::vector<double> mean(p, 0.0), sd(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
      for (std::size_t r = 0; r < n; ++r) mean[c] += pr.x(r, c);
      mean[c] /= static_cast<double>(n);
      for (std::size_t r = 0; r < n; ++r) sd[c] += std::pow(pr.x(r, c) - mean[c], 2);
      sd[c] = std::sqrt(sd[c] / static_cast<double>(n));
    }
    double y_mean = 0.0;
    for (const double v : pr.y) y_mean += v;
    y_mean /= static_cast<double>(n);

    Matrix aug(n + p, p);
    std::vector<double> ya(n + p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < p; ++c) aug(r, c) = (pr.x(r, c) - mean[c]) / sd[c];
      ya[r] = pr.y[r] - y_mean;
    }
    for (std::size_t c = 0; c < p; ++c) aug(n + c, c) = std::sqrt(alpha);
    const auto beta = oracle::normal_equation_ols(aug, ya, false);

    const auto m = fit_ridge(pr.x, pr.y, alpha);
    double intercept = y_mean;
    for (std::size_t c = 0; c < p; ++c) {
      EXPECT_NEAR(m.coefficients[c], beta[c] / sd[c], 1e-8);
      intercept -= beta[c] / sd[c] * mean[c];
    }
    EXPECT_NEAR(m.intercept, intercept, 1e-8);
  }
}

TEST(Ridge, ShrinksAndHandlesCollinearity) {
  const auto pr = random_problem(5, 50, 3);
  const auto small = fit_ridge(pr.x, pr.y, 1e-3);
  const auto big = fit_ridge(pr.x, pr.y, 1e4);
  double ns = 0, nb = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    ns += small.coefficients[c] * small.coefficients[c];
    nb += big.coefficients[c] * big.coefficients[c];
  }
  EXPECT_LT(nb, ns);
  Matrix x(6, 2);
  std::vector<double> y(6);
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = static_cast<double>(i);
    y[i] = static_cast<double>(2 * i);
  }
  const auto m = fit_ridge(x, y, 0.1);
  EXPECT_NEAR(m.coefficients[0], m.coefficients[1], 1e-12);
  EXPECT_THROW(fit_ridge(x, y, 0.0), Error);
}

TEST(Standardizer, ApplyAndUncentered) {
  Matrix x(3, 1);
  x(0, 0) = 1;
  x(1, 0) = 2;
  x(2, 0) = 3;
  const auto s = Standardizer::fit(x, true);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.scale[0], std::sqrt(2.0 / 3.0));
  const auto z = s.apply(x);
  EXPECT_NEAR(z(0, 0) + z(1, 0) + z(2, 0), 0.0, 1e-12);
  const auto u = Standardizer::fit(x, false);
  EXPECT_DOUBLE_EQ(u.mean[0], 0.0);
  EXPECT_DOUBLE_EQ(u.scale[0], std::sqrt(14.0 / 3.0));
}
