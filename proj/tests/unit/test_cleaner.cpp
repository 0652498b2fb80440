#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "forge/cleaner.hpp"
#include "forge/error.hpp"
#include "forge/parser.hpp"
#include "forge/snapshot.hpp"

using namespace forge;
using namespace forge::cleaner;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FORGE_FIXTURES_DIR;
const fs::path kData = FORGE_DATA_DIR_FOR_TESTS;

struct ColumnSpec {
  std::string title;
  std::vector<CellValue> cells;
};

Table make_table(const std::vector<std::string>& keys, const std::vector<ColumnSpec>& specs) {
  TableBuilder b(keys);
  std::vector<CellValue> codes;
  for (const auto& k : keys) codes.emplace_back(Text{k});
  b.add_column(ColumnName::country_code(), std::move(codes));
  for (const auto& s : specs) b.add_column(parse_column_name(s.title), s.cells);
  return std::move(b).build(Version::v1);
}

const CellValue M{};

Table terror_table() {
  return make_table({"aa", "bb", "cc"},
                    {{"num people-and-society-population", {10.0, 20.0, 30.0}},
                     {"txt terrorism-terrorist-groups-home-based isil", {Text{"x"}, M, Text{"y"}}},
                     {"txt terrorism-terrorist-groups-home-based hezbollah", {Text{"x"}, M, M}},
                     {"txt terrorism-terrorist-groups-home-based al-qa'ida", {M, M, M}},
                     {"num transportation-heliports", {1.0, M, M}}});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CleanerConfig shipped_config() {
  CleanerConfig config;
  config.droplist = load_droplist(kData / "droplist.json");
  config.manifest = load_mnar_manifest(kData / "mnar_manifest.json");
  config.families = default_families();
  return config;
}

}  // namespace

TEST(DropRows, DroplistAndMissingPopulation) {
  const auto t = make_table({"aa", "bb", "xx", "zz"}, {{"num people-and-society-population", {1.0, M, 7e9, 5.0}},
                                                      {"txt geography-climate", {Text{"a"}, Text{"b"}, Text{"c"}, M}}});
  Droplist d;
  d.codes = {"xx", "qq"};
  const auto r = drop_nonstate_rows(t, d);
  ASSERT_EQ(r.table.row_count(), 2u);
  EXPECT_EQ(r.table.row_keys()[0], "aa");
  EXPECT_EQ(r.table.row_keys()[1], "zz");
  ASSERT_EQ(r.dropped.size(), 2u);
  EXPECT_EQ(r.dropped[0].code, "bb");
  EXPECT_EQ(r.dropped[0].reason, "no official population figure");
  EXPECT_EQ(r.dropped[1].code, "xx");
  EXPECT_EQ(r.dropped[1].reason, "non-state entity");
  // Unknown droplist code is only a warning.
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("qq"), std::string::npos);
  // bb: code + climate; xx: code + population + climate.
  EXPECT_EQ(r.filled_cells_lost, 5u);
}

TEST(Concat, PresenceFamilyJoinsSortedSubfieldTitles) {
  ConcatFamily family{"terrorism-terrorist-groups-home-based",
                      parse_column_name("txt terrorism-terrorist-groups-home-based"), ConcatFamily::Mode::presence};
  const auto r = concat_group_columns(terror_table(), family);
  EXPECT_EQ(r.source_count, 3u);
  const auto& col = r.table.column("txt terrorism-terrorist-groups-home-based");
  EXPECT_EQ(col.cells[0], CellValue::text("hezbollah; isil"));
  EXPECT_TRUE(col.cells[1].is_missing());
  EXPECT_EQ(col.cells[2], CellValue::text("isil"));
  EXPECT_FALSE(r.table.has_column("txt terrorism-terrorist-groups-home-based isil"));
  // Takes the position of the first family member.
  EXPECT_EQ(r.table.column(2).title, "txt terrorism-terrorist-groups-home-based");
}

TEST(Concat, ValuedFamilyKeepsValues) {
  const auto t = make_table({"aa", "bb"}, {{"num geography-land-boundaries-border-countries spain", {1214.0, M}},
                                           {"num geography-land-boundaries-border-countries andorra", {63.7, M}},
                                           {"txt geography-land-boundaries-border-countries-overall", {M, M}}});
  ConcatFamily family{"geography-land-boundaries-border-countries",
                      parse_column_name("txt geography-land-boundaries-border-countries-overall"),
                      ConcatFamily::Mode::valued};
  const auto r = concat_group_columns(t, family);
  EXPECT_EQ(r.source_count, 3u);
  EXPECT_EQ(r.table.column_count(), 2u);
  EXPECT_EQ(r.table.column("txt geography-land-boundaries-border-countries-overall").cells[0],
            CellValue::text("andorra: 63.7; spain: 1214"));
}

TEST(Concat, EmptyFamilyIsNoOp) {
  const auto t = terror_table();
  const auto r = concat_group_columns(t, ConcatFamily{"nothing", parse_column_name("txt nothing"), {}});
  EXPECT_EQ(r.source_count, 0u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.table, t);
}

TEST(Mnar, FillsByDtype) {
  const auto t = make_table(
      {"aa", "bb"}, {{"num transportation-heliports", {M, 3.0}},
                     {"txt people-and-society-major-infectious-diseases food or waterborne diseases", {M, Text{"x"}}},
                     {"lbl government-legal-system", {M, Label{"civil law"}}},
                     {"num economy-gdp", {M, 1.0}}});
  MnarManifest m;
  m.entries = {{"num transportation-heliports", {}},
               {"txt people-and-society-major-infectious-diseases", {}},
               {"lbl government-legal-system", {}},
               {"num stale-column", {}}};
  const auto r = fill_mnar(t, m);
  EXPECT_EQ(r.table.column("num transportation-heliports").cells[0], CellValue(0.0));
  EXPECT_EQ(r.table.column("num transportation-heliports").cells[1], CellValue(3.0));
  EXPECT_EQ(
      r.table.column("txt people-and-society-major-infectious-diseases food or waterborne diseases").cells[0],
      CellValue::text("none"));
  EXPECT_EQ(r.table.column("lbl government-legal-system").cells[0], CellValue::label("None/NA"));
  EXPECT_TRUE(r.table.column("num economy-gdp").cells[0].is_missing());
  EXPECT_EQ(r.cells_filled, 3u);
  EXPECT_EQ(r.stale_patterns, std::vector<std::string>{"num stale-column"});
}

TEST(Mnar, TypeMismatch) {
  EXPECT_THROW(mnar_fill_for(parse_column_name("enc a_b"), std::nullopt), Error);
  EXPECT_THROW(mnar_fill_for(parse_column_name("num a"), CellValue::text("x")), Error);
  EXPECT_EQ(mnar_fill_for(parse_column_name("txt a"), CellValue::text("nil")), CellValue::text("nil"));
  EXPECT_EQ(mnar_fill_for(parse_column_name("amount a"), CellValue(2.0)), CellValue(2.0));
}

TEST(Mnar, ShippedManifest) {
  const auto m = load_mnar_manifest(kData / "mnar_manifest.json");
  EXPECT_EQ(m.entries.size(), 101u);
  EXPECT_TRUE(m.covers("num transportation-heliports"));
  EXPECT_TRUE(m.covers("txt people-and-society-major-infectious-diseases food or waterborne diseases"));
  EXPECT_FALSE(m.covers("num transportation-heliportsx"));
}

TEST(Sparse, StrictThreshold) {
  std::vector<CellValue> c96(100, M), c95(100, M), c50(100, M);
  for (int i = 0; i < 4; ++i) c96[i] = 1.0;
  for (int i = 0; i < 5; ++i) c95[i] = 1.0;
  for (int i = 0; i < 50; ++i) c50[i] = 1.0;
  std::vector<std::string> keys;
  for (int i = 0; i < 100; ++i) keys.push_back("k" + std::to_string(i));
  const auto t = make_table(keys, {{"num a96", c96}, {"num a95", c95}, {"num a50", c50}});

  const auto r = drop_sparse_columns(t, 0.95);
  EXPECT_EQ(r.dropped, std::vector<std::string>{"num a96"});
  EXPECT_EQ(r.filled_cells_lost, 4u);
  EXPECT_TRUE(r.table.has_column("num a95"));
  EXPECT_TRUE(drop_sparse_columns(t, 1.0).dropped.empty());
  EXPECT_THROW(drop_sparse_columns(t, 0.0), Error);
}

TEST(Clean, FixtureMatchesGoldenV2) {
  const auto ingest = parser::ingest_directory(kFixtures / "entities");
  const auto v1 = parser::build_table_v1(ingest.documents).table;
  const auto result = clean(v1, shipped_config());
  const auto dir = fs::temp_directory_path() / "forge_test_golden_v2";
  fs::remove_all(dir);
  write_snapshot(result.table, dir / "v2.csv");
  EXPECT_EQ(slurp(dir / "v2.csv"), slurp(kFixtures / "golden" / "v2.csv"));
  EXPECT_EQ(result.table.version(), Version::v2);
  EXPECT_TRUE(result.report.accounting_holds());
}

// Invariant: filled_after = filled_before - row losses - column losses + MNAR fills + concat delta.
TEST(CleanInvariant, AccountingIdentityAndNonDestruction) {
  const auto v1 = make_table({"aa", "bb", "cc", "xx"},
                             {{"num people-and-society-population", {10.0, 20.0, 30.0, 40.0}},
                              {"txt terrorism-terrorist-groups-home-based isil", {Text{"x"}, M, Text{"y"}, M}},
                              {"txt terrorism-terrorist-groups-home-based hezbollah", {Text{"x"}, M, M, M}},
                              {"num transportation-heliports", {1.0, M, M, 5.0}},
                              {"num economy-sparse", {M, M, M, 5.0}},
                              {"num economy-gdp", {M, 2.0, 3.0, 4.0}}});
  CleanerConfig config;
  config.droplist.codes = {"xx"};
  config.manifest.entries = {{"num transportation-heliports", {}},
                             {"txt terrorism-terrorist-groups-home-based", {}}};
  config.families = default_families();
  config.sparse_threshold = 0.6;
  const auto r = clean(v1, config);
  const auto& rep = r.report;
  EXPECT_TRUE(rep.accounting_holds());
  const auto lhs = static_cast<std::int64_t>(rep.stats_after.filled_cells);
  const auto rhs = static_cast<std::int64_t>(rep.stats_before.filled_cells) -
                   static_cast<std::int64_t>(rep.cells_lost_to_row_drops) -
                   static_cast<std::int64_t>(rep.cells_lost_to_column_drops) +
                   static_cast<std::int64_t>(rep.mnar_cells_filled) + rep.concatenation_delta;
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(rep.cells_lost_to_row_drops, 5u);  // xx: code, population, heliports, sparse, gdp
  EXPECT_EQ(rep.columns_dropped, std::vector<std::string>{"num economy-sparse"});
  EXPECT_EQ(rep.concatenation_delta, -1);  // three member cells become two joined cells
  EXPECT_EQ(rep.mnar_cells_filled, 3u);    // heliports bb, cc; terrorist list bb

  // Non-destruction: every surviving pre-existing cell is unchanged.
  for (const auto& column : r.table.columns()) {
    const auto src = v1.find_column(column.title);
    if (!src) continue;
    for (std::size_t row = 0; row < r.table.row_count(); ++row) {
      const auto& before = v1.column(*src).cells[*v1.find_row(r.table.row_keys()[row])];
      if (!before.is_missing()) {
        EXPECT_EQ(column.cells[row], before) << column.title;
      }
    }
  }
}

TEST(Clean, StepOrderMatters) {
  const auto v1 = make_table({"aa", "bb", "cc"}, {{"num people-and-society-population", {1.0, 2.0, 3.0}},
                                                  {"num transportation-heliports", {M, M, 1.0}}});
  CleanerConfig config;
  config.manifest.entries = {{"num transportation-heliports", {}}};
  config.sparse_threshold = 0.5;
  const auto default_order = clean(v1, config);
  const std::array<CleaningStep, 4> permuted{CleaningStep::rows, CleaningStep::concat, CleaningStep::sparse,
                                             CleaningStep::mnar};
  const auto swapped = clean(v1, config, permuted);
  EXPECT_TRUE(default_order.table.has_column("num transportation-heliports"));
  EXPECT_FALSE(swapped.table.has_column("num transportation-heliports"));
  EXPECT_NE(default_order.report.stats_after, swapped.report.stats_after);
  EXPECT_TRUE(swapped.report.accounting_holds());
}

TEST(Clean, IdempotentOnCleanTable) {
  const auto ingest = parser::ingest_directory(kFixtures / "entities");
  const auto config = shipped_config();
  const auto once = clean(parser::build_table_v1(ingest.documents).table, config);
  const auto twice = clean(once.table, config);
  EXPECT_TRUE(twice.report.rows_dropped.empty());
  EXPECT_TRUE(twice.report.columns_dropped.empty());
  EXPECT_EQ(twice.report.mnar_cells_filled, 0u);
  EXPECT_EQ(twice.table, once.table);
}

TEST(Clean, ReportJson) {
  const auto r = clean(terror_table(), CleanerConfig{});
  const auto j = to_json(r.report);
  EXPECT_TRUE(j.at("accounting_holds").get<bool>());
  EXPECT_TRUE(j.contains("stats_after_step"));
}
