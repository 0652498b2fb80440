#include <random>

#include <gtest/gtest.h>

#include "forge/column_name.hpp"
#include "forge/error.hpp"
#include "synthetic.hpp"

using namespace forge;

namespace {

ErrorKind kind_of(std::string_view name) {
  try {
    parse_column_name(name);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for '" << name << "'";
  return ErrorKind::ConfigInvalid;
}

}  // namespace

TEST(ColumnName, ParsesFullGrammar) {
  const auto n = parse_column_name("num (MAPE): 1.05 economy-gdp-per-capita purchasing power hist");
  EXPECT_EQ(n.dtype, Dtype::num);
  ASSERT_TRUE(n.mape);
  EXPECT_DOUBLE_EQ(*n.mape, 1.05);
  EXPECT_EQ(n.body, "economy-gdp-per-capita");
  EXPECT_EQ(n.subfield, "purchasing power");
  EXPECT_TRUE(n.hist);
}

TEST(ColumnName, BodyOnly) {
  const auto n = parse_column_name("amount transnational-issues-refugees");
  EXPECT_EQ(n.dtype, Dtype::amount);
  EXPECT_EQ(n.body, "transnational-issues-refugees");
  EXPECT_FALSE(n.subfield);
  EXPECT_FALSE(n.hist);
  EXPECT_FALSE(n.mape);
}

TEST(ColumnName, ReservedNames) {
  EXPECT_EQ(parse_column_name("Country Code").reserved, ReservedColumn::country_code);
  EXPECT_EQ(parse_column_name("txt Country Name").reserved, ReservedColumn::country_name);
  EXPECT_EQ(parse_column_name("lbl Region").reserved, ReservedColumn::region);
  EXPECT_EQ(format_column_name(ColumnName::region()), "lbl Region");
}

TEST(ColumnName, Errors) {
  EXPECT_EQ(kind_of("foo economy-gdp"), ErrorKind::UnknownDtype);
  EXPECT_EQ(kind_of("num (MAPE): abc economy-gdp"), ErrorKind::MalformedMape);
  EXPECT_EQ(kind_of("num (MAPE):1.0 economy-gdp"), ErrorKind::MalformedMape);
  EXPECT_EQ(kind_of("num"), ErrorKind::MalformedName);
  EXPECT_EQ(kind_of(""), ErrorKind::MalformedName);
}

TEST(ColumnName, MapeRenderedWithTwoDecimals) {
  auto n = parse_column_name("num economy-gdp");
  n.mape = 3.14159;
  EXPECT_EQ(format_column_name(n), "num (MAPE): 3.14 economy-gdp");
}

TEST(ColumnName, WithDtypeDropsMapeAndReservation) {
  auto n = parse_column_name("num (MAPE): 2.00 economy-gdp total");
  const auto m = with_dtype(n, Dtype::lbl);
  EXPECT_EQ(format_column_name(m), "lbl economy-gdp total");
}

// Invariant suite: 1000 generated names survive format -> parse -> format.
TEST(ColumnNameInvariant, RoundTripThousandNames) {
  std::mt19937_64 rng(20191231);
  for (int i = 0; i < 1000; ++i) {
    const auto name = synth::random_column_name(rng);
    const auto text = format_column_name(name);
    const auto parsed = parse_column_name(text);
    ASSERT_EQ(parsed, name) << text;
    ASSERT_EQ(format_column_name(parsed), text);
  }
}
