#include "forge/snapshot.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forge/csv.hpp"
#include "forge/error.hpp"

namespace forge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  // Shortest round-trip digits; plain notation unless the magnitude is extreme.
  char buf[400];
  const double mag = std::fabs(v);
  const auto fmt = (mag == 0.0 || (mag >= 1e-6 && mag < 1e21)) ? std::chars_format::fixed : std::chars_format::general;
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, fmt);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

std::string encode_cell(const CellValue& cell) {
  if (cell.is_missing()) return {};
  if (cell.is_number()) return format_number(cell.as_number());
  if (cell.is_binary()) return cell.as_binary() ? "1" : "0";
  const auto& s = cell.string_payload();
  return csv::escape(s, s.empty());
}

CellValue decode_cell(const ColumnName& name, const csv::Field& field, const std::string& title) {
  if (field.value.empty() && !field.quoted) return Missing{};
  auto bad = [&](const char* what) {
    return Error(ErrorKind::SchemaMismatch, std::string(what) + " '" + field.value + "' in column '" + title + "'");
  };
  switch (name.reserved) {
    case ReservedColumn::country_code:
    case ReservedColumn::country_name: return Text{field.value};
    case ReservedColumn::region: return Label{field.value};
    case ReservedColumn::none: break;
  }
  switch (name.dtype) {
    case Dtype::txt: return Text{field.value};
    case Dtype::lbl: return Label{field.value};
    case Dtype::enc:
      if (field.value == "0") return CellValue::binary(false);
      if (field.value == "1") return CellValue::binary(true);
      throw bad("binary cell");
    case Dtype::num:
    case Dtype::sum:
    case Dtype::amount: {
      double v = 0.0;
      const auto* first = field.value.data();
      const auto* last = first + field.value.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last) throw bad("number cell");
      return CellValue(v);
    }
  }
  throw bad("cell");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace

fs::path schema_path_for(const fs::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".schema.json");
  return p;
}

void write_snapshot(const Table& table, const fs::path& csv_path) {
  if (table.column_count() == 0 || table.column(0).name.reserved != ReservedColumn::country_code) {
    throw Error(ErrorKind::SchemaMismatch, "snapshot tables must start with the \"Country Code\" column");
  }

  std::string data;
  json schema = json::array();
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    const auto& column = table.column(c);
    if (c) data += ',';
    data += csv::escape(column.title);
    schema.push_back({{"name", column.title},
                      {"dtype", std::string(to_string(column.name.dtype))},
                      {"hist", column.name.hist},
                      {"mape", column.name.mape ? json(*column.name.mape) : json(nullptr)}});
  }
  data += '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      if (c) data += ',';
      data += encode_cell(table.column(c).cells[r]);
    }
    data += '\n';
  }

  write_file(csv_path, data);
  write_file(schema_path_for(csv_path), schema.dump(2) + "\n");
}

Table read_snapshot(const fs::path& csv_path, std::optional<Version> version) {
  const auto records = csv::parse(read_file(csv_path));
  json schema;
  try {
    schema = json::parse(read_file(schema_path_for(csv_path)));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("bad schema sidecar: ") + e.what());
  }
  if (!schema.is_array()) throw Error(ErrorKind::SchemaMismatch, "schema sidecar must be an array");
  if (records.empty()) throw Error(ErrorKind::SchemaMismatch, "snapshot has no header row");

  const auto& header = records.front();
  if (header.size() != schema.size()) {
    throw Error(ErrorKind::SchemaMismatch, "data has " + std::to_string(header.size()) + " columns, schema has " +
                                               std::to_string(schema.size()));
  }

  std::vector<ColumnName> names;
  names.reserve(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& entry = schema[c];
    if (entry.value("name", std::string{}) != header[c].value) {
      throw Error(ErrorKind::SchemaMismatch, "column " + std::to_string(c) + " is '" + header[c].value +
                                                 "' in data but '" + entry.value("name", std::string{}) +
                                                 "' in schema");
    }
    auto name = parse_column_name(header[c].value);
    const auto dtype = dtype_from_string(entry.value("dtype", std::string{}));
    if (!dtype || *dtype != name.dtype) {
      throw Error(ErrorKind::SchemaMismatch, "dtype disagreement for '" + header[c].value + "'");
    }
    if (entry.value("hist", false) != name.hist) {
      throw Error(ErrorKind::SchemaMismatch, "hist flag disagreement for '" + header[c].value + "'");
    }
    names.push_back(std::move(name));
  }
  if (names.empty() || names.front().reserved != ReservedColumn::country_code) {
    throw Error(ErrorKind::SchemaMismatch, "first column must be \"Country Code\"");
  }

  std::vector<Column> columns;
  columns.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    columns.push_back(Column{names[c], header[c].value, {}});
  }
  std::vector<std::string> keys;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.size() == 1 && record.front().value.empty() && !record.front().quoted) continue;
    if (record.size() != names.size()) {
      throw Error(ErrorKind::SchemaMismatch, "row " + std::to_string(r) + " has " + std::to_string(record.size()) +
                                                 " fields, expected " + std::to_string(names.size()));
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      columns[c].cells.push_back(decode_cell(names[c], record[c], header[c].value));
    }
    if (!columns[0].cells.back().is_text()) {
      throw Error(ErrorKind::SchemaMismatch, "row " + std::to_string(r) + " has no country code");
    }
    keys.push_back(columns[0].cells.back().as_text());
  }

  if (!version) version = version_from_string(csv_path.stem().string());
  return Table(version.value_or(Version::v1), std::move(keys), std::move(columns));
}

}  // namespace forge
