#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "forge/column_name.hpp"
#include "forge/matrix.hpp"
#include "forge/table.hpp"

namespace forge::synth {

/// Random, grammar-valid column name (reserved names included now and then).
ColumnName random_column_name(std::mt19937_64& rng);

struct TargetTruth {
  std::string title;
  bool linear = true;
  std::vector<double> truth;            // noiseless-observed value per row
  std::vector<std::size_t> held_back;   // rows blanked in the table
};

/// Table with complete features f1..f6 and targets with known ground truth:
///   lin_a = 20 + 4 f1, lin_b = 300 - 7 f2, lin_c = 5 + 2.5 f3,
///   lin_multi = 5 (f4 + f5) - 5  (no single feature passes the MAPE gate),
///   step = 10 or 100 depending on f6 (nonlinear).
/// Observed values carry multiplicative N(0, noise) error; `missing_fraction`
/// of every target is blanked.
struct SyntheticImputation {
  Table table;
  std::vector<TargetTruth> targets;
};

SyntheticImputation make_imputation_table(std::uint64_t seed, std::size_t rows = 200, double noise = 0.01,
                                          double missing_fraction = 0.2);

/// Small v4-like table for quick imputer tests.
Table make_numeric_table(const std::vector<std::string>& titles, const std::vector<std::vector<double>>& columns,
                         Version version = Version::v4);

namespace oracle {

/// Least squares from the normal equations (X'X) b = X'y, solved by Gaussian
/// elimination with partial pivoting. With an intercept, b[0] is the intercept.
std::vector<double> normal_equation_ols(const model::Matrix& x, const std::vector<double>& y, bool intercept);

/// Mean of |a - p| / |a| over pairs with a != 0, summed in index order.
double mape_loop(const std::vector<double>& actual, const std::vector<double>& predicted);

}  // namespace oracle
}  // namespace forge::synth
