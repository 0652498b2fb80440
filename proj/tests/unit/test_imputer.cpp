#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/imputer.hpp"
#include "synthetic.hpp"

using namespace forge;
using namespace forge::imputer;
namespace ft = forge::synth;

namespace {

ImputerConfig quick_config() {
  ImputerConfig c;
  c.runs = 4;
  c.forest.trees = 30;
  c.seed = 2019;
  c.threads = 1;
  return c;
}

const ColumnOutcome* outcome_for(const ImputationReport& report, std::string_view title, Stage stage) {
  for (const auto& c : report.columns) {
    if (c.column == title && c.stage == stage) return &c;
  }
  return nullptr;
}

/// Title in `table` whose body and subfield match `title` (the MAPE tag may differ).
std::string find_by_identity(const Table& table, std::string_view title) {
  const auto want = parse_column_name(title);
  for (const auto& c : table.columns()) {
    if (c.name.dtype == want.dtype && c.name.body == want.body && c.name.subfield == want.subfield &&
        c.name.hist == want.hist) {
      return c.title;
    }
  }
  return {};
}

}  // namespace

TEST(Selection, SingleFeatureAndThreshold) {
  const auto t = ft::make_numeric_table({"num a-x", "num a-y", "num a-z", "num a-t"},
                                        {{1, 2, 3, 4, 5, 6},
                                         {6, 1, 5, 2, 4, 3},
                                         {1, 2, 3, 4, 5, 7},
                                         {2.1, 3.9, 6.2, 8.1, NAN, 12.2}});
  EXPECT_EQ(select_feature_single(t, "num a-t"), "num a-x");
  const auto feats = select_features_threshold(t, "num a-t", 0.4, stats::CorrelationMethod::pearson);
  EXPECT_EQ(feats, (std::vector<std::string>{"num a-x", "num a-z"}));
  // Rank-perfect features pass a near-1 threshold.
  EXPECT_EQ(select_features_threshold(t, "num a-t", 0.999, stats::CorrelationMethod::spearman).size(), 2u);
  EXPECT_THROW(select_feature_single(t, "txt nope"), Error);
}

TEST(View, CompleteAndTargets) {
  const auto t = ft::make_numeric_table({"num a-x", "sum a-y", "amount a-z"}, {{1, 2, 3}, {1, NAN, 3}, {NAN, 1, 2}});
  const auto v = NumericView::from(t);
  EXPECT_EQ(v.complete_columns().size(), 1u);
  EXPECT_EQ(v.target_columns().size(), 2u);
}

TEST(Imputer, RecoversLinearTargets) {
  const auto synth = ft::make_imputation_table(17);
  const auto result = impute(synth.table, quick_config());
  EXPECT_EQ(result.table.version(), Version::v5);
  for (const auto& target : synth.targets) {
    if (!target.linear) continue;
    const auto title = find_by_identity(result.table, target.title);
    ASSERT_FALSE(title.empty()) << target.title;
    const auto& cells = result.table.column(title).cells;
    std::size_t close = 0;
    for (const auto r : target.held_back) {
      ASSERT_TRUE(cells[r].is_number()) << target.title;
      if (std::abs(cells[r].as_number() - target.truth[r]) <= 0.10 * std::abs(target.truth[r])) ++close;
    }
    EXPECT_GE(static_cast<double>(close), 0.95 * static_cast<double>(target.held_back.size())) << target.title;
    EXPECT_TRUE(parse_column_name(title).mape.has_value()) << title;
  }
}

TEST(Imputer, StagesPickTheRightFamily) {
  const auto synth = ft::make_imputation_table(23);
  const auto config = quick_config();
  const auto single = impute_stage_single_linear(synth.table, config);
  for (const char* t : {"num synth-lin-a", "num synth-lin-b", "num synth-lin-c"}) {
    const auto* o = outcome_for(single.report, t, Stage::single_linear);
    ASSERT_NE(o, nullptr) << t;
    EXPECT_TRUE(o->accepted) << t;
    EXPECT_EQ(o->best->family, "ols_single");
  }
  const auto* step = outcome_for(single.report, "num synth-step", Stage::single_linear);
  ASSERT_NE(step, nullptr);
  EXPECT_FALSE(step->accepted);
  EXPECT_EQ(step->reason, "MapeAboveGate");

  const auto* multi = outcome_for(single.report, "sum synth-lin-multi", Stage::single_linear);
  ASSERT_NE(multi, nullptr);
  EXPECT_FALSE(multi->accepted);
  const auto ridge = impute_stage_ridge(single.table, config);
  const auto* rm = outcome_for(ridge.report, "sum synth-lin-multi", Stage::ridge);
  ASSERT_NE(rm, nullptr);
  EXPECT_TRUE(rm->accepted);
  EXPECT_EQ(rm->best->family, "ridge_multi");
  EXPECT_EQ(rm->best->features, (std::vector<std::string>{"num synth-feature f4", "num synth-feature f5"}));

  const auto forest = impute_stage_forest(ridge.table, config);
  const auto* fs = outcome_for(forest.report, "num synth-step", Stage::forest);
  ASSERT_NE(fs, nullptr);
  EXPECT_TRUE(fs->accepted);
  EXPECT_EQ(fs->best->family, "random_forest");
  // Single-feature OLS picks f1 for lin-a.
  EXPECT_EQ(outcome_for(single.report, "num synth-lin-a", Stage::single_linear)->best->features,
            std::vector<std::string>{"num synth-feature f1"});
}

TEST(Imputer, NeverOverwritesObservedCells) {
  const auto synth = ft::make_imputation_table(5);
  const auto result = impute(synth.table, quick_config());
  ASSERT_EQ(result.table.row_count(), synth.table.row_count());
  ASSERT_EQ(result.table.column_count(), synth.table.column_count());
  for (std::size_t c = 0; c < synth.table.column_count(); ++c) {
    const auto& before = synth.table.column(c);
    const auto& after = result.table.column(c);
    EXPECT_EQ(after.name.body, before.name.body);
    for (std::size_t r = 0; r < before.cells.size(); ++r) {
      if (!before.cells[r].is_missing()) {
        EXPECT_EQ(after.cells[r], before.cells[r]) << before.title << " " << r;
      }
    }
  }
  std::size_t filled = 0;
  for (const auto& t : result.report.totals) filled += t.cells_filled;
  EXPECT_EQ(filled, result.report.total_cells_filled());
  EXPECT_EQ(missing_stats(synth.table).empty_cells - missing_stats(result.table).empty_cells, filled);
}

TEST(Imputer, DeterministicAcrossThreadCounts) {
  const auto synth = ft::make_imputation_table(31, 120);
  auto c1 = quick_config();
  auto c4 = quick_config();
  c4.threads = 4;
  const auto a = impute(synth.table, c1);
  const auto b = impute(synth.table, c4);
  ASSERT_EQ(a.table.column_count(), b.table.column_count());
  for (std::size_t c = 0; c < a.table.column_count(); ++c) EXPECT_EQ(a.table.column(c), b.table.column(c));
  EXPECT_EQ(to_json(a.report).dump(), to_json(b.report).dump());
}

TEST(Imputer, NoTestRowLeaksIntoFitting) {
  const auto synth = ft::make_imputation_table(41, 100);
  auto config = quick_config();
  config.runs = 2;
  std::vector<model::FitRecord> records;
  config.observer = [&](const model::FitRecord& r) { records.push_back(r); };
  impute(synth.table, config);
  ASSERT_FALSE(records.empty());

  const auto view = NumericView::from(synth.table);
  std::size_t checked_means = 0;
  for (const auto& rec : records) {
    std::set<std::size_t> train(rec.train_rows.begin(), rec.train_rows.end());
    for (const auto t : rec.test_rows) EXPECT_EQ(train.count(t), 0u) << rec.target << " " << rec.purpose;
    if (!rec.standardized) continue;
    ASSERT_EQ(rec.feature_mean.size(), rec.features.size());
    for (std::size_t j = 0; j < rec.features.size(); ++j) {
      if (rec.features[j].rfind("num synth-feature", 0) != 0) continue;
      const auto col = *view.find(rec.features[j]);
      double m = 0.0;
      for (const auto r : rec.train_rows) m += view.values[col][r];
      m /= static_cast<double>(rec.train_rows.size());
      if (rec.centered) {
        EXPECT_NEAR(rec.feature_mean[j], m, 1e-9 * std::max(1.0, std::abs(m)));
        ++checked_means;
      }
    }
  }
  EXPECT_GT(checked_means, 0u);
}

TEST(Imputer, ThinColumnsAndNoFeatures) {
  auto config = quick_config();
  const auto t = ft::make_numeric_table({"num a-x", "num a-y"}, {{1, 2, 3, 4, 5}, {1, NAN, 3, 4, 5}});
  const auto r = impute_stage_single_linear(t, config);
  ASSERT_EQ(r.report.columns.size(), 1u);
  EXPECT_EQ(r.report.columns[0].reason, "InsufficientRows");
  config.min_rows = 2;
  const auto only = ft::make_numeric_table({"num a-y"}, {{1, NAN, 3, 4, 5}});
  EXPECT_EQ(impute_stage_single_linear(only, config).report.columns[0].reason, "NoCompleteColumns");
  config.runs = 0;
  EXPECT_THROW(impute_stage_single_linear(t, config), Error);
}

TEST(Rename, TagsAcceptedColumns) {
  const auto t = ft::make_numeric_table({"num a-x", "num a-y sub"}, {{1, 2}, {3, 4}});
  ImputationReport report;
  ColumnOutcome o;
  o.column = "num a-y sub";
  o.accepted = true;
  o.best = ModelFit{};
  o.best->mape.value = 0.012345;
  report.columns.push_back(o);
  EXPECT_EQ(report.filled_mape_percent().at("num a-y sub"), 1.23);
  const auto v5 = rename_filled(t, report);
  EXPECT_TRUE(v5.has_column("num (MAPE): 1.23 a-y sub"));
  EXPECT_TRUE(v5.has_column("num a-x"));
  EXPECT_EQ(v5.version(), Version::v5);
}
