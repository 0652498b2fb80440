#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace forge {

enum class Dtype { txt, num, lbl, enc, sum, amount };

std::string_view to_string(Dtype dtype) noexcept;
std::optional<Dtype> dtype_from_string(std::string_view token) noexcept;

/// True for num, sum and amount.
bool is_numeric_dtype(Dtype dtype) noexcept;

enum class ReservedColumn { none, country_code, country_name, region };

inline constexpr std::string_view kCountryCodeColumn = "Country Code";
inline constexpr std::string_view kCountryNameColumn = "txt Country Name";
inline constexpr std::string_view kRegionColumn = "lbl Region";

/// Parsed column title:
///   <dtype> [(MAPE): <percent>] <category-field> [<subfield>] [hist]
///
/// The body (category and field, hyphen-joined) is the first space-free token
/// after the dtype and optional MAPE prefix; everything up to an optional
/// trailing "hist" is the subfield.
struct ColumnName {
  Dtype dtype = Dtype::txt;
  std::optional<double> mape;  // percent, e.g. 1.05 means 1.05%
  std::string body;
  std::optional<std::string> subfield;
  bool hist = false;
  ReservedColumn reserved = ReservedColumn::none;

  static ColumnName country_code();
  static ColumnName country_name();
  static ColumnName region();

  bool is_reserved() const noexcept { return reserved != ReservedColumn::none; }

  friend bool operator==(const ColumnName&, const ColumnName&) = default;
};

/// Throws UnknownDtype, MalformedMape or MalformedName.
ColumnName parse_column_name(std::string_view name);

/// Inverse of parse_column_name. MAPE is rendered with two decimals.
std::string format_column_name(const ColumnName& name);

/// Same name with a different dtype tag (used for generated columns).
ColumnName with_dtype(ColumnName name, Dtype dtype);

}  // namespace forge
