#include "forge/column_name.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "forge/error.hpp"

namespace forge {
namespace {

constexpr std::array<std::pair<Dtype, std::string_view>, 6> kDtypes{{
    {Dtype::txt, "txt"},
    {Dtype::num, "num"},
    {Dtype::lbl, "lbl"},
    {Dtype::enc, "enc"},
    {Dtype::sum, "sum"},
    {Dtype::amount, "amount"},
}};

constexpr std::string_view kMapePrefix = "(MAPE):";
constexpr std::string_view kHistSuffix = " hist";

}  // namespace

std::string_view to_string(Dtype dtype) noexcept {
  for (const auto& [d, s] : kDtypes) {
    if (d == dtype) return s;
  }
  return "txt";
}

std::optional<Dtype> dtype_from_string(std::string_view token) noexcept {
  for (const auto& [d, s] : kDtypes) {
    if (s == token) return d;
  }
  return std::nullopt;
}

bool is_numeric_dtype(Dtype dtype) noexcept {
  return dtype == Dtype::num || dtype == Dtype::sum || dtype == Dtype::amount;
}

ColumnName ColumnName::country_code() {
  ColumnName c;
  c.dtype = Dtype::txt;
  c.body = std::string(kCountryCodeColumn);
  c.reserved = ReservedColumn::country_code;
  return c;
}

ColumnName ColumnName::country_name() {
  ColumnName c;
  c.dtype = Dtype::txt;
  c.body = "Country";
  c.subfield = "Name";
  c.reserved = ReservedColumn::country_name;
  return c;
}

ColumnName ColumnName::region() {
  ColumnName c;
  c.dtype = Dtype::lbl;
  c.body = "Region";
  c.reserved = ReservedColumn::region;
  return c;
}

ColumnName parse_column_name(std::string_view name) {
  if (name.empty()) throw Error(ErrorKind::MalformedName, "empty column name");
  if (name == kCountryCodeColumn) return ColumnName::country_code();
  if (name == kCountryNameColumn) return ColumnName::country_name();
  if (name == kRegionColumn) return ColumnName::region();

  ColumnName out;
  const auto first_space = name.find(' ');
  const auto dtype_token = name.substr(0, first_space);
  const auto dtype = dtype_from_string(dtype_token);
  if (!dtype) {
    throw Error(ErrorKind::UnknownDtype, "'" + std::string(dtype_token) + "' in '" + std::string(name) + "'");
  }
  out.dtype = *dtype;
  if (first_space == std::string_view::npos) {
    throw Error(ErrorKind::MalformedName, "no body in '" + std::string(name) + "'");
  }
  std::string_view rest = name.substr(first_space + 1);

  if (rest.starts_with(kMapePrefix)) {
    rest.remove_prefix(kMapePrefix.size());
    if (!rest.starts_with(' ')) {
      throw Error(ErrorKind::MalformedMape, "expected ' <number>' after (MAPE): in '" + std::string(name) + "'");
    }
    rest.remove_prefix(1);
    const auto end = rest.find(' ');
    const auto number = rest.substr(0, end);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc{} || ptr != number.data() + number.size() || number.empty() || !std::isfinite(value) ||
        value < 0.0) {
      throw Error(ErrorKind::MalformedMape, "'" + std::string(number) + "' in '" + std::string(name) + "'");
    }
    out.mape = value;
    if (end == std::string_view::npos) {
      throw Error(ErrorKind::MalformedName, "no body in '" + std::string(name) + "'");
    }
    rest = rest.substr(end + 1);
  }

  if (rest.ends_with(kHistSuffix) && rest.size() > kHistSuffix.size()) {
    out.hist = true;
    rest.remove_suffix(kHistSuffix.size());
  }

  const auto body_end = rest.find(' ');
  out.body = std::string(rest.substr(0, body_end));
  if (out.body.empty()) {
    throw Error(ErrorKind::MalformedName, "empty body in '" + std::string(name) + "'");
  }
  if (body_end != std::string_view::npos) {
    auto sub = rest.substr(body_end + 1);
    if (sub.empty()) throw Error(ErrorKind::MalformedName, "empty subfield in '" + std::string(name) + "'");
    out.subfield = std::string(sub);
  }
  return out;
}

std::string format_column_name(const ColumnName& name) {
  switch (name.reserved) {
    case ReservedColumn::country_code: return std::string(kCountryCodeColumn);
    case ReservedColumn::country_name: return std::string(kCountryNameColumn);
    case ReservedColumn::region:
      if (name.dtype == Dtype::lbl) return std::string(kRegionColumn);
      break;
    case ReservedColumn::none: break;
  }
  std::string out(to_string(name.dtype));
  if (name.mape) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (MAPE): %.2f", *name.mape);
    out += buf;
  }
  out += ' ';
  out += name.body;
  if (name.subfield) {
    out += ' ';
    out += *name.subfield;
  }
  if (name.hist) out += kHistSuffix;
  return out;
}

ColumnName with_dtype(ColumnName name, Dtype dtype) {
  name.dtype = dtype;
  name.mape.reset();
  name.reserved = ReservedColumn::none;
  return name;
}

}  // namespace forge
