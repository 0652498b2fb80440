#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forge/model_selection.hpp"
#include "forge/random_forest.hpp"
#include "forge/statistics.hpp"
#include "forge/table.hpp"

namespace forge::imputer {

enum class Stage { single_linear, ridge, forest };

std::string_view to_string(Stage stage) noexcept;
inline constexpr Stage kStages[] = {Stage::single_linear, Stage::ridge, Stage::forest};

struct ImputerConfig {
  double ridge_threshold = 0.4;
  stats::CorrelationMethod method = stats::CorrelationMethod::pearson;
  bool ridge_all_features = false;  // baseline: every complete column
  std::size_t runs = 10;
  std::size_t folds = 5;
  double acceptance_mape = 0.15;
  double test_fraction = 0.2;
  std::size_t min_rows = 10;
  std::vector<double> ridge_alphas{0.01, 0.1, 1.0, 10.0, 100.0};
  model::ForestParams forest{};
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency
  model::FitObserver observer;
};

/// Numeric columns of a table; NaN marks Missing.
struct NumericView {
  std::size_t rows = 0;
  std::vector<std::size_t> table_index;
  std::vector<std::string> titles;
  std::vector<Dtype> dtypes;
  std::vector<std::vector<double>> values;
  std::vector<std::size_t> missing;

  static NumericView from(const Table& table);
  std::optional<std::size_t> find(std::string_view title) const;
  /// Complete num/sum/amount/enc columns, table order.
  std::vector<std::size_t> complete_columns() const;
  /// num/sum/amount columns with at least one Missing cell.
  std::vector<std::size_t> target_columns() const;
};

/// argmax |coefficient| over candidates on the given rows; ties keep the earlier column.
std::optional<std::size_t> best_single_feature(const NumericView& view, std::span<const std::size_t> candidates,
                                               std::span<const std::size_t> rows, std::span<const double> y,
                                               stats::CorrelationMethod method = stats::CorrelationMethod::pearson);

/// Candidates with |coefficient| >= threshold (inclusive) on the given rows.
std::vector<std::size_t> threshold_features(const NumericView& view, std::span<const std::size_t> candidates,
                                            std::span<const std::size_t> rows, std::span<const double> y,
                                            double threshold, stats::CorrelationMethod method);

/// Table-level selection over rows where the target is present.
std::string select_feature_single(const Table& table, std::string_view target);
std::vector<std::string> select_features_threshold(const Table& table, std::string_view target, double threshold,
                                                   stats::CorrelationMethod method);

struct ModelFit {
  std::string family;  // ols_single, ridge_multi, random_forest
  std::map<std::string, double> params;
  std::vector<std::string> features;
  std::vector<double> coefficients;
  double intercept = 0.0;
  std::optional<double> cv_score;
  stats::ZeroExcludedMape mape;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
};

struct ColumnOutcome {
  std::string column;
  Stage stage = Stage::single_linear;
  std::size_t pass = 0;
  std::size_t runs_attempted = 0;
  std::vector<std::optional<double>> run_mapes;  // held-out MAPE per run, nullopt when unassessable
  std::optional<ModelFit> best;
  bool accepted = false;
  std::size_t cells_filled = 0;
  std::string reason;  // why nothing was filled
};

struct StageTotals {
  Stage stage = Stage::single_linear;
  std::size_t columns_attempted = 0;
  std::size_t columns_accepted = 0;
  std::size_t cells_filled = 0;
  std::size_t missing_at_entry = 0;  // whole-table Missing count
  std::size_t missing_at_exit = 0;
  double reduction_vs_v4 = 0.0;
  double reduction_vs_entry = 0.0;
};

struct ImputationReport {
  std::size_t v4_missing = 0;
  std::vector<ColumnOutcome> columns;
  std::vector<StageTotals> totals;

  /// Accepted column -> MAPE in percent, rounded to 2 decimals.
  std::map<std::string, double> filled_mape_percent() const;
  std::size_t total_cells_filled() const noexcept;
};

nlohmann::json to_json(const ImputationReport& report);

/// One target column under one stage. Never throws forge::Error; failures
/// end up in `reason`.
ColumnOutcome attempt_target(const NumericView& view, std::size_t target, std::span<const std::size_t> candidates,
                             Stage stage, const ImputerConfig& config,
                             std::vector<double>* fills = nullptr);

struct StageResult {
  Table table;
  ImputationReport report;
};

StageResult impute_stage(const Table& table, Stage stage, const ImputerConfig& config,
                         std::optional<std::size_t> v4_missing = std::nullopt);
StageResult impute_stage_single_linear(const Table& table, const ImputerConfig& config);
StageResult impute_stage_ridge(const Table& table, const ImputerConfig& config);
StageResult impute_stage_forest(const Table& table, const ImputerConfig& config);

/// Adds "(MAPE): x.xx" to every accepted column.
Table rename_filled(const Table& table, const ImputationReport& report);

/// single -> ridge -> forest, then rename; yields v5.
StageResult impute(const Table& v4, const ImputerConfig& config);

}  // namespace forge::imputer
