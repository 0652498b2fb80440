#include "forge/imputer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "parallel.hpp"

namespace forge::imputer {
namespace {

constexpr double kThresholdSlack = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_target_dtype(Dtype d) { return d == Dtype::num || d == Dtype::sum || d == Dtype::amount; }

std::vector<double> gather(const std::vector<double>& column, std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(column[r]);
  return out;
}

model::Matrix design(const NumericView& view, std::span<const std::size_t> features, std::span<const std::size_t> rows) {
  model::Matrix x(rows.size(), features.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) x(i, j) = view.values[features[j]][rows[i]];
  }
  return x;
}

std::vector<std::string> titles_of(const NumericView& view, std::span<const std::size_t> columns) {
  std::vector<std::string> out;
  for (const auto c : columns) out.push_back(view.titles[c]);
  return out;
}

double round_percent(double fraction) { return std::round(fraction * 100.0 * 100.0) / 100.0; }

/// Serializes observer calls from concurrent target fits.
class LockedObserver {
 public:
  explicit LockedObserver(const model::FitObserver& inner) : inner_(inner) {}
  model::FitObserver wrapped() {
    if (!inner_) return {};
    return [this](const model::FitRecord& record) {
      std::lock_guard lock(mutex_);
      inner_(record);
    };
  }

 private:
  const model::FitObserver& inner_;
  std::mutex mutex_;
};

}  // namespace

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::single_linear:
      return "single_linear";
    case Stage::ridge:
      return "ridge";
    case Stage::forest:
      return "forest";
  }
  return "single_linear";
}

NumericView NumericView::from(const Table& table) {
  NumericView view;
  view.rows = table.row_count();
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    const auto& column = table.column(c);
    if (!is_numeric_dtype(column.name.dtype) || column.name.is_reserved()) continue;
    std::vector<double> values(view.rows, kNaN);
    std::size_t missing = 0;
    for (std::size_t r = 0; r < view.rows; ++r) {
      const auto& cell = column.cells[r];
      if (cell.is_numeric()) values[r] = cell.numeric();
      else ++missing;
    }
    view.table_index.push_back(c);
    view.titles.push_back(column.title);
    view.dtypes.push_back(column.name.dtype);
    view.values.push_back(std::move(values));
    view.missing.push_back(missing);
  }
  return view;
}

std::optional<std::size_t> NumericView::find(std::string_view title) const {
  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (titles[i] == title) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> NumericView::complete_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (missing[i] == 0 && rows > 0) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> NumericView::target_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (missing[i] > 0 && is_target_dtype(dtypes[i])) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> best_single_feature(const NumericView& view, std::span<const std::size_t> candidates,
                                               std::span<const std::size_t> rows, std::span<const double> y,
                                               stats::CorrelationMethod method) {
  std::optional<std::size_t> best;
  double best_strength = -1.0;
  for (const auto c : candidates) {
    const auto x = gather(view.values[c], rows);
    const double strength = stats::correlation_strength(method, x, y);
    if (strength > best_strength) {
      best = c;
      best_strength = strength;
    }
  }
  return best;
}

std::vector<std::size_t> threshold_features(const NumericView& view, std::span<const std::size_t> candidates,
                                            std::span<const std::size_t> rows, std::span<const double> y,
                                            double threshold, stats::CorrelationMethod method) {
  std::vector<std::size_t> out;
  for (const auto c : candidates) {
    const auto x = gather(view.values[c], rows);
    if (stats::correlation_strength(method, x, y) >= threshold - kThresholdSlack) out.push_back(c);
  }
  return out;
}

namespace {

struct TargetRows {
  std::size_t target;
  std::vector<std::size_t> present;
  std::vector<double> y;
};

TargetRows target_rows(const NumericView& view, std::string_view title) {
  const auto t = view.find(title);
  if (!t) throw Error(ErrorKind::TypeMismatch, "'" + std::string(title) + "' is not a numeric column");
  TargetRows out{*t, {}, {}};
  for (std::size_t r = 0; r < view.rows; ++r) {
    if (!std::isnan(view.values[*t][r])) {
      out.present.push_back(r);
      out.y.push_back(view.values[*t][r]);
    }
  }
  return out;
}

std::vector<std::size_t> candidates_without(const NumericView& view, std::size_t target) {
  auto c = view.complete_columns();
  std::erase(c, target);
  return c;
}

}  // namespace

std::string select_feature_single(const Table& table, std::string_view target) {
  const auto view = NumericView::from(table);
  const auto t = target_rows(view, target);
  const auto candidates = candidates_without(view, t.target);
  if (candidates.empty()) throw Error(ErrorKind::NoCompleteColumns, "no complete numeric column");
  return view.titles[*best_single_feature(view, candidates, t.present, t.y)];
}

std::vector<std::string> select_features_threshold(const Table& table, std::string_view target, double threshold,
                                                   stats::CorrelationMethod method) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorKind::ConfigInvalid, "threshold must lie in (0, 1]");
  const auto view = NumericView::from(table);
  const auto t = target_rows(view, target);
  const auto candidates = candidates_without(view, t.target);
  if (candidates.empty()) throw Error(ErrorKind::NoCompleteColumns, "no complete numeric column");
  const auto selected = threshold_features(view, candidates, t.present, t.y, threshold, method);
  if (selected.empty()) throw Error(ErrorKind::EmptySelection, "no feature reaches the threshold");
  return titles_of(view, selected);
}

std::map<std::string, double> ImputationReport::filled_mape_percent() const {
  std::map<std::string, double> out;
  for (const auto& c : columns) {
    if (c.accepted && c.best) out[c.column] = round_percent(c.best->mape.value);
  }
  return out;
}

std::size_t ImputationReport::total_cells_filled() const noexcept {
  std::size_t total = 0;
  for (const auto& c : columns) total += c.cells_filled;
  return total;
}

namespace {

/// Standardization stats and predictions of one fitted run.
struct RunFit {
  ModelFit fit;
  std::vector<double> test_predictions;
  std::vector<double> fill_predictions;
};

void notify(const model::FitObserver& observer, model::FitRecord record, const std::optional<model::Standardizer>& s) {
  if (!observer) return;
  if (s) {
    record.standardized = true;
    record.centered = s->centered;
    record.feature_mean = s->mean;
    record.feature_scale = s->scale;
  }
  observer(record);
}

RunFit fit_linear(const NumericView& view, Stage stage, const std::vector<std::size_t>& features,
                  std::span<const std::size_t> train, std::span<const double> y_train,
                  std::span<const std::size_t> test, std::span<const std::size_t> missing_rows,
                  const ImputerConfig& config, std::uint64_t seed, model::FitRecord record) {
  const auto x_train = design(view, features, train);
  const bool single = stage == Stage::single_linear;
  const auto fitter = single ? model::ols_fitter() : model::ridge_fitter(config.ridge_alphas);
  const std::size_t grid = single ? 2 : config.ridge_alphas.size();

  model::CvContext context{train, record, &config.observer};
  const auto cv = model::grid_search_cv(grid, fitter, x_train, y_train, config.folds,
                                        stats::derive_seed(seed, {"cv"}), &context);
  const auto fitted = fitter(x_train, y_train, cv.best_index);
  record.purpose = "final";
  record.train_rows.assign(train.begin(), train.end());
  record.test_rows.assign(test.begin(), test.end());
  notify(config.observer, record, fitted.standardizer);

  RunFit out;
  const auto& model = *fitted.linear;
  out.fit.family = single ? "ols_single" : "ridge_multi";
  if (single) out.fit.params["fit_intercept"] = cv.best_index == 0 ? 1.0 : 0.0;
  else out.fit.params["alpha"] = config.ridge_alphas[cv.best_index];
  out.fit.coefficients = model.coefficients;
  out.fit.intercept = model.intercept;
  out.fit.cv_score = cv.best_score;
  out.test_predictions = model.predict(design(view, features, test));
  out.fill_predictions = model.predict(design(view, features, missing_rows));
  return out;
}

RunFit fit_forest(const NumericView& view, std::span<const std::size_t> candidates, std::span<const std::size_t> train,
                  std::span<const double> y_train, std::span<const std::size_t> test,
                  std::span<const std::size_t> missing_rows, const ImputerConfig& config, std::uint64_t seed,
                  model::FitRecord record, std::vector<std::size_t>& selected) {
  auto params = config.forest;
  params.seed = stats::derive_seed(seed, {"importance"});
  const auto prelim = model::RandomForest::fit(design(view, candidates, train), y_train, params);
  record.purpose = "importance";
  record.features = titles_of(view, candidates);
  record.train_rows.assign(train.begin(), train.end());
  record.test_rows.assign(test.begin(), test.end());
  notify(config.observer, record, std::nullopt);

  // Keep features at or above the mean importance.
  const auto& imp = prelim.importances();
  const double mean = imp.empty() ? 0.0 : std::accumulate(imp.begin(), imp.end(), 0.0) / static_cast<double>(imp.size());
  selected.clear();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (imp[j] > 0.0 && imp[j] >= mean - kThresholdSlack) selected.push_back(candidates[j]);
  }
  if (selected.empty()) selected.assign(candidates.begin(), candidates.end());

  params.seed = stats::derive_seed(seed, {"forest"});
  const auto forest = model::RandomForest::fit(design(view, selected, train), y_train, params);
  record.purpose = "final";
  record.features = titles_of(view, selected);
  notify(config.observer, record, std::nullopt);

  RunFit out;
  out.fit.family = "random_forest";
  out.fit.params = {{"trees", static_cast<double>(params.trees)},
                    {"max_depth", static_cast<double>(params.max_depth)},
                    {"min_samples_leaf", static_cast<double>(params.min_samples_leaf)},
                    {"max_features", static_cast<double>(params.max_features)},
                    {"importance_cutoff", mean}};
  out.test_predictions = forest.predict(design(view, selected, test));
  out.fill_predictions = forest.predict(design(view, selected, missing_rows));
  return out;
}

}  // namespace

ColumnOutcome attempt_target(const NumericView& view, std::size_t target, std::span<const std::size_t> candidates_in,
                             Stage stage, const ImputerConfig& config, std::vector<double>* fills) {
  ColumnOutcome outcome;
  outcome.column = view.titles[target];
  outcome.stage = stage;

  std::vector<std::size_t> candidates(candidates_in.begin(), candidates_in.end());
  std::erase(candidates, target);
  std::vector<std::size_t> present;
  std::vector<std::size_t> missing_rows;
  for (std::size_t r = 0; r < view.rows; ++r) {
    (std::isnan(view.values[target][r]) ? missing_rows : present).push_back(r);
  }
  if (present.size() < config.min_rows) {
    outcome.reason = "InsufficientRows";
    return outcome;
  }
  if (candidates.empty()) {
    outcome.reason = "NoCompleteColumns";
    return outcome;
  }

  std::optional<RunFit> best;
  std::string last_failure;
  for (std::size_t run = 0; run < config.runs; ++run) {
    ++outcome.runs_attempted;
    const auto seed = stats::derive_seed(config.seed, {to_string(stage), outcome.column, std::to_string(run)});
    try {
      const auto split = model::train_test_split(present.size(), config.test_fraction, seed);
      std::vector<std::size_t> train;
      std::vector<std::size_t> test;
      for (const auto p : split.train) train.push_back(present[p]);
      for (const auto p : split.test) test.push_back(present[p]);
      const auto y_train = gather(view.values[target], train);
      const auto y_test = gather(view.values[target], test);

      model::FitRecord record;
      record.stage = std::string(to_string(stage));
      record.target = outcome.column;

      std::vector<std::size_t> features;
      RunFit fit;
      if (stage == Stage::forest) {
        fit = fit_forest(view, candidates, train, y_train, test, missing_rows, config, seed, record, features);
      } else {
        if (stage == Stage::single_linear) {
          features = {*best_single_feature(view, candidates, train, y_train, stats::CorrelationMethod::pearson)};
        } else if (config.ridge_all_features) {
          features = candidates;
        } else {
          features = threshold_features(view, candidates, train, y_train, config.ridge_threshold, config.method);
          if (features.empty()) throw Error(ErrorKind::EmptySelection, "no feature reaches the threshold");
        }
        record.features = titles_of(view, features);
        fit = fit_linear(view, stage, features, train, y_train, test, missing_rows, config, seed, record);
      }
      fit.fit.features = titles_of(view, features);
      fit.fit.mape = stats::zero_excluded_mape(y_test, fit.test_predictions);
      fit.fit.train_rows = train.size();
      fit.fit.test_rows = test.size();
      fit.fit.run = run;
      fit.fit.seed = seed;
      outcome.run_mapes.push_back(fit.fit.mape.value);
      if (!best || fit.fit.mape.value < best->fit.mape.value) best = std::move(fit);
    } catch (const Error& e) {
      outcome.run_mapes.push_back(std::nullopt);
      last_failure = std::string(forge::to_string(e.kind()));
    }
  }

  if (!best) {
    outcome.reason = last_failure.empty() ? "NoAssessableRun" : last_failure;
    return outcome;
  }
  outcome.best = best->fit;
  const bool finite = std::all_of(best->fill_predictions.begin(), best->fill_predictions.end(),
                                  [](double v) { return std::isfinite(v); });
  if (!(best->fit.mape.value < config.acceptance_mape)) {
    outcome.reason = "MapeAboveGate";
  } else if (!finite) {
    outcome.reason = "NonFinitePrediction";
  } else {
    outcome.accepted = true;
    outcome.cells_filled = missing_rows.size();
    if (fills) *fills = best->fill_predictions;
  }
  return outcome;
}

StageResult impute_stage(const Table& table, Stage stage, const ImputerConfig& config,
                         std::optional<std::size_t> v4_missing) {
  if (config.runs == 0) throw Error(ErrorKind::ConfigInvalid, "runs must be positive");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "test fraction must lie in (0, 1)");
  }
  StageResult result;
  result.table = table;
  const auto entry_missing = missing_stats(table).empty_cells;
  result.report.v4_missing = v4_missing.value_or(entry_missing);

  LockedObserver locked(config.observer);
  auto local = config;
  local.observer = locked.wrapped();

  std::map<std::string, std::size_t> last_candidates;
  std::map<std::string, ColumnOutcome> latest;
  std::vector<std::string> order;

  for (std::size_t pass = 1;; ++pass) {
    const auto view = NumericView::from(result.table);
    const auto candidates = view.complete_columns();
    std::vector<std::size_t> jobs;
    for (const auto t : view.target_columns()) {
      const auto it = last_candidates.find(view.titles[t]);
      if (it == last_candidates.end() || it->second != candidates.size()) jobs.push_back(t);
    }
    if (jobs.empty()) break;

    std::vector<ColumnOutcome> outcomes(jobs.size());
    std::vector<std::vector<double>> fills(jobs.size());
    detail::parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
      outcomes[i] = attempt_target(view, jobs[i], candidates, stage, local, &fills[i]);
    });

    TableBuilder builder(result.table);
    bool filled_any = false;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      auto& outcome = outcomes[i];
      outcome.pass = pass;
      last_candidates[outcome.column] = candidates.size();
      if (!latest.contains(outcome.column)) order.push_back(outcome.column);
      if (outcome.accepted) {
        const auto& column = result.table.column(view.table_index[jobs[i]]);
        auto cells = column.cells;
        std::size_t k = 0;
        for (auto& cell : cells) {
          if (cell.is_missing()) cell = CellValue(fills[i][k++]);
        }
        builder.set_cells(column.title, std::move(cells));
        filled_any = true;
      }
      latest[outcome.column] = std::move(outcome);
    }
    result.table = std::move(builder).build(table.version());
    if (!filled_any) break;
  }

  StageTotals totals;
  totals.stage = stage;
  totals.missing_at_entry = entry_missing;
  totals.missing_at_exit = missing_stats(result.table).empty_cells;
  for (const auto& title : order) {
    auto& outcome = latest.at(title);
    ++totals.columns_attempted;
    if (outcome.accepted) {
      ++totals.columns_accepted;
      totals.cells_filled += outcome.cells_filled;
    }
    result.report.columns.push_back(std::move(outcome));
  }
  const auto filled = static_cast<double>(totals.cells_filled);
  totals.reduction_vs_v4 = result.report.v4_missing ? filled / static_cast<double>(result.report.v4_missing) : 0.0;
  totals.reduction_vs_entry = entry_missing ? filled / static_cast<double>(entry_missing) : 0.0;
  result.report.totals.push_back(totals);
  return result;
}

StageResult impute_stage_single_linear(const Table& table, const ImputerConfig& config) {
  return impute_stage(table, Stage::single_linear, config);
}

StageResult impute_stage_ridge(const Table& table, const ImputerConfig& config) {
  return impute_stage(table, Stage::ridge, config);
}

StageResult impute_stage_forest(const Table& table, const ImputerConfig& config) {
  return impute_stage(table, Stage::forest, config);
}

Table rename_filled(const Table& table, const ImputationReport& report) {
  TableBuilder builder(table);
  for (const auto& [title, percent] : report.filled_mape_percent()) {
    if (!builder.find_column(title)) continue;
    auto name = builder.column(title).name;
    name.mape = percent;
    builder.rename_column(title, std::move(name));
  }
  return std::move(builder).build(Version::v5);
}

StageResult impute(const Table& v4, const ImputerConfig& config) {
  StageResult out;
  out.report.v4_missing = missing_stats(v4).empty_cells;
  Table current = v4;
  for (const auto stage : kStages) {
    auto stage_result = impute_stage(current, stage, config, out.report.v4_missing);
    current = std::move(stage_result.table);
    for (auto& c : stage_result.report.columns) out.report.columns.push_back(std::move(c));
    for (auto& t : stage_result.report.totals) out.report.totals.push_back(t);
  }
  out.table = rename_filled(current, out.report);
  return out;
}

nlohmann::json to_json(const ImputationReport& report) {
  using nlohmann::json;
  json columns = json::array();
  for (const auto& c : report.columns) {
    json runs = json::array();
    for (const auto& m : c.run_mapes) runs.push_back(m ? json(*m) : json(nullptr));
    json entry = {{"column", c.column},         {"stage", to_string(c.stage)},
                  {"pass", c.pass},             {"runs", c.runs_attempted},
                  {"run_mapes", runs},          {"accepted", c.accepted},
                  {"cells_filled", c.cells_filled}, {"reason", c.reason}};
    if (c.best) {
      const auto& b = *c.best;
      entry["best"] = {{"family", b.family},
                       {"params", b.params},
                       {"features", b.features},
                       {"coefficients", b.coefficients},
                       {"intercept", b.intercept},
                       {"cv_score", b.cv_score ? json(*b.cv_score) : json(nullptr)},
                       {"mape", b.mape.value},
                       {"mape_pairs_used", b.mape.pairs_used},
                       {"mape_pairs_dropped_zero", b.mape.pairs_dropped_zero},
                       {"train_rows", b.train_rows},
                       {"test_rows", b.test_rows},
                       {"run", b.run},
                       {"seed", b.seed}};
    }
    columns.push_back(std::move(entry));
  }
  json totals = json::array();
  for (const auto& t : report.totals) {
    totals.push_back({{"stage", to_string(t.stage)},
                      {"columns_attempted", t.columns_attempted},
                      {"columns_accepted", t.columns_accepted},
                      {"cells_filled", t.cells_filled},
                      {"missing_at_entry", t.missing_at_entry},
                      {"missing_at_exit", t.missing_at_exit},
                      {"reduction_vs_v4", t.reduction_vs_v4},
                      {"reduction_vs_entry", t.reduction_vs_entry}});
  }
  return {{"v4_missing", report.v4_missing}, {"totals", totals}, {"columns", columns}};
}

}  // namespace forge::imputer
