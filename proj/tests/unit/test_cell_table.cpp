#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "forge/error.hpp"
#include "forge/table.hpp"

using namespace forge;

namespace {

Table small_table() {
  TableBuilder b({"aa", "bb", "cc"});
  b.add_column(ColumnName::country_code(), {Text{"aa"}, Text{"bb"}, Text{"cc"}});
  b.add_column(parse_column_name("num economy-gdp"), {1.0, Missing{}, 3.0});
  b.add_column(parse_column_name("lbl geography-climate"), {Label{"tropical"}, Label{"polar"}, Missing{}});
  return std::move(b).build(Version::v2);
}

}  // namespace

TEST(CellValue, RejectsNonFiniteNumbers) {
  EXPECT_THROW(CellValue(std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_THROW(CellValue(std::numeric_limits<double>::infinity()), Error);
  EXPECT_NO_THROW(CellValue(-0.0));
}

TEST(CellValue, BinaryOnlyZeroOrOne) {
  EXPECT_THROW(CellValue(Binary{2}), Error);
  EXPECT_TRUE(CellValue::binary(true).as_binary());
  EXPECT_DOUBLE_EQ(CellValue::binary(true).numeric(), 1.0);
  EXPECT_DOUBLE_EQ(CellValue(2.5).numeric(), 2.5);
}

TEST(CellValue, VariantsAreDistinct) {
  EXPECT_NE(CellValue::text("a"), CellValue::label("a"));
  EXPECT_EQ(CellValue(), CellValue(Missing{}));
  EXPECT_TRUE(CellValue().is_missing());
  EXPECT_EQ(describe(CellValue()), "Missing");
}

TEST(Table, RejectsDuplicateKeysAndColumns) {
  std::vector<Column> cols{Column{ColumnName::country_code(), "", {Text{"aa"}, Text{"aa"}}}};
  EXPECT_THROW(Table(Version::v1, {"aa", "aa"}, cols), Error);

  TableBuilder b({"aa"});
  b.add_column(parse_column_name("num a"), {1.0});
  try {
    b.add_column(parse_column_name("num a"), {2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateColumn);
  }
}

TEST(Table, RejectsIllegalCells) {
  TableBuilder b({"aa"});
  try {
    b.add_column(parse_column_name("num a"), {CellValue::text("x")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TypeMismatch);
  }
  EXPECT_THROW(b.add_column(parse_column_name("enc a_x"), {CellValue(1.0)}), Error);
}

TEST(Table, LookupAndStats) {
  const auto t = small_table();
  EXPECT_EQ(t.version(), Version::v2);
  EXPECT_EQ(t.row_count(), 3u);
  EXPECT_EQ(t.column_count(), 3u);
  EXPECT_EQ(t.find_row("bb"), 1u);
  EXPECT_FALSE(t.find_row("zz"));
  EXPECT_EQ(t.column("num economy-gdp").missing_count(), 1u);
  EXPECT_THROW(t.column("num nothing"), std::out_of_range);

  const auto s = missing_stats(t);
  EXPECT_EQ(s.total_cells, 9u);
  EXPECT_EQ(s.empty_cells, 2u);
  EXPECT_EQ(s.filled_cells, 7u);
  EXPECT_NEAR(s.empty_fraction(), 2.0 / 9.0, 1e-15);
}

TEST(TableBuilder, RetainRowsKeepsOrderAndValues) {
  TableBuilder b(small_table());
  b.retain_rows({true, false, true});
  const auto t = std::move(b).build(Version::v2);
  ASSERT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.row_keys()[0], "aa");
  EXPECT_EQ(t.row_keys()[1], "cc");
  EXPECT_EQ(t.column(0).cells[0], CellValue::text("aa"));
  EXPECT_EQ(t.column("num economy-gdp").cells[1], CellValue(3.0));
}

TEST(TableBuilder, EditingOperations) {
  TableBuilder b(small_table());
  b.insert_column(1, parse_column_name("txt note"), {Text{"x"}, Missing{}, Missing{}});
  EXPECT_EQ(b.columns()[1].title, "txt note");
  b.rename_column("txt note", parse_column_name("txt remark"));
  EXPECT_TRUE(b.find_column("txt remark"));
  EXPECT_FALSE(b.find_column("txt note"));
  b.set_cells("num economy-gdp", {4.0, 5.0, 6.0});
  b.remove_column("txt remark");
  const auto t = std::move(b).build(Version::v3);
  EXPECT_EQ(t.column("num economy-gdp").cells[1], CellValue(5.0));
  EXPECT_EQ(t.column_count(), 3u);
}

TEST(Table, Disambiguate) {
  auto n = parse_column_name("num economy-gdp total hist");
  EXPECT_EQ(format_column_name(disambiguate(n, 1)), "num economy-gdp total hist");
  EXPECT_EQ(format_column_name(disambiguate(n, 2)), "num economy-gdp total #2 hist");
}

TEST(Version, RoundTrip) {
  for (auto v : {Version::v1, Version::v2, Version::v3, Version::v4, Version::v5}) {
    EXPECT_EQ(version_from_string(to_string(v)), v);
  }
  EXPECT_FALSE(version_from_string("v6"));
}
