#include "forge/table.hpp"

#include <algorithm>
#include <stdexcept>

#include "forge/error.hpp"

namespace forge {

std::string_view to_string(Version version) noexcept {
  switch (version) {
    case Version::v1: return "v1";
    case Version::v2: return "v2";
    case Version::v3: return "v3";
    case Version::v4: return "v4";
    case Version::v5: return "v5";
  }
  return "v1";
}

std::optional<Version> version_from_string(std::string_view s) noexcept {
  if (s == "v1") return Version::v1;
  if (s == "v2") return Version::v2;
  if (s == "v3") return Version::v3;
  if (s == "v4") return Version::v4;
  if (s == "v5") return Version::v5;
  return std::nullopt;
}

std::size_t Column::missing_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellValue& c) { return c.is_missing(); }));
}

bool cell_allowed(const ColumnName& name, const CellValue& cell) noexcept {
  if (cell.is_missing()) return true;
  switch (name.reserved) {
    case ReservedColumn::country_code:
    case ReservedColumn::country_name: return cell.is_text();
    case ReservedColumn::region: return cell.is_label();
    case ReservedColumn::none: break;
  }
  switch (name.dtype) {
    case Dtype::txt: return cell.is_text();
    case Dtype::lbl: return cell.is_label();
    case Dtype::enc: return cell.is_binary();
    case Dtype::num:
    case Dtype::sum:
    case Dtype::amount: return cell.is_number();
  }
  return false;
}

namespace {

void validate_column(const Column& column, std::size_t rows) {
  if (column.cells.size() != rows) {
    throw Error(ErrorKind::SchemaMismatch, "column '" + column.title + "' has " +
                                               std::to_string(column.cells.size()) + " cells, expected " +
                                               std::to_string(rows));
  }
  for (const auto& cell : column.cells) {
    if (!cell_allowed(column.name, cell)) {
      throw Error(ErrorKind::TypeMismatch, "cell " + describe(cell) + " not allowed in '" + column.title + "'");
    }
  }
}

}  // namespace

Table::Table(Version version, std::vector<std::string> row_keys, std::vector<Column> columns)
    : version_(version), row_keys_(std::move(row_keys)), columns_(std::move(columns)) {
  for (std::size_t i = 0; i < row_keys_.size(); ++i) {
    if (!row_index_.emplace(row_keys_[i], i).second) {
      throw Error(ErrorKind::SchemaMismatch, "duplicate row key '" + row_keys_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    auto& column = columns_[i];
    if (column.title.empty()) column.title = format_column_name(column.name);
    validate_column(column, row_keys_.size());
    if (!column_index_.emplace(column.title, i).second) {
      throw Error(ErrorKind::DuplicateColumn, "duplicate column '" + column.title + "'");
    }
  }
}

const Column& Table::column(std::string_view title) const {
  const auto index = find_column(title);
  if (!index) throw std::out_of_range("no column '" + std::string(title) + "'");
  return columns_[*index];
}

std::optional<std::size_t> Table::find_column(std::string_view title) const {
  const auto it = column_index_.find(std::string(title));
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Table::find_row(std::string_view code) const {
  const auto it = row_index_.find(std::string(code));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

TableBuilder::TableBuilder(std::vector<std::string> row_keys) : row_keys_(std::move(row_keys)) {}

TableBuilder::TableBuilder(const Table& base)
    : row_keys_(base.row_keys().begin(), base.row_keys().end()),
      columns_(base.columns().begin(), base.columns().end()) {
  reindex();
}

std::optional<std::size_t> TableBuilder::find_column(std::string_view title) const {
  const auto it = column_index_.find(std::string(title));
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

const Column& TableBuilder::column(std::string_view title) const {
  const auto index = find_column(title);
  if (!index) throw std::out_of_range("no column '" + std::string(title) + "'");
  return columns_[*index];
}

void TableBuilder::check_cells(const ColumnName& name, const std::vector<CellValue>& cells) const {
  Column probe{name, format_column_name(name), {}};
  if (cells.size() != row_keys_.size()) {
    throw Error(ErrorKind::SchemaMismatch, "column '" + probe.title + "' has " + std::to_string(cells.size()) +
                                               " cells, expected " + std::to_string(row_keys_.size()));
  }
  for (const auto& cell : cells) {
    if (!cell_allowed(name, cell)) {
      throw Error(ErrorKind::TypeMismatch, "cell " + describe(cell) + " not allowed in '" + probe.title + "'");
    }
  }
}

const std::string& TableBuilder::add_column(ColumnName name, std::vector<CellValue> cells) {
  return insert_column(columns_.size(), std::move(name), std::move(cells));
}

const std::string& TableBuilder::insert_column(std::size_t position, ColumnName name,
                                               std::vector<CellValue> cells) {
  check_cells(name, cells);
  auto title = format_column_name(name);
  if (column_index_.contains(title)) {
    throw Error(ErrorKind::DuplicateColumn, "column '" + title + "' already exists");
  }
  position = std::min(position, columns_.size());
  columns_.insert(columns_.begin() + static_cast<std::ptrdiff_t>(position),
                  Column{std::move(name), std::move(title), std::move(cells)});
  reindex();
  return columns_[position].title;
}

void TableBuilder::remove_column(std::string_view title) {
  const auto index = find_column(title);
  if (!index) throw std::out_of_range("no column '" + std::string(title) + "'");
  columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(*index));
  reindex();
}

void TableBuilder::set_cells(std::string_view title, std::vector<CellValue> cells) {
  const auto index = find_column(title);
  if (!index) throw std::out_of_range("no column '" + std::string(title) + "'");
  check_cells(columns_[*index].name, cells);
  columns_[*index].cells = std::move(cells);
}

void TableBuilder::rename_column(std::string_view title, ColumnName name) {
  const auto index = find_column(title);
  if (!index) throw std::out_of_range("no column '" + std::string(title) + "'");
  check_cells(name, columns_[*index].cells);
  auto new_title = format_column_name(name);
  if (new_title != title && column_index_.contains(new_title)) {
    throw Error(ErrorKind::DuplicateColumn, "column '" + new_title + "' already exists");
  }
  columns_[*index].name = std::move(name);
  columns_[*index].title = std::move(new_title);
  reindex();
}

void TableBuilder::retain_rows(const std::vector<bool>& keep) {
  if (keep.size() != row_keys_.size()) {
    throw Error(ErrorKind::SchemaMismatch, "row mask size mismatch");
  }
  auto filter = [&keep](auto& values) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!keep[i]) continue;
      if (out != i) values[out] = std::move(values[i]);
      ++out;
    }
    values.resize(out);
  };
  filter(row_keys_);
  for (auto& column : columns_) filter(column.cells);
}

Table TableBuilder::build(Version version) && {
  return Table(version, std::move(row_keys_), std::move(columns_));
}

void TableBuilder::reindex() {
  column_index_.clear();
  for (std::size_t i = 0; i < columns_.size(); ++i) column_index_.emplace(columns_[i].title, i);
}

MissingStats missing_stats(std::span<const Column> columns, std::size_t rows) {
  MissingStats stats;
  stats.total_cells = columns.size() * rows;
  for (const auto& column : columns) stats.empty_cells += column.missing_count();
  stats.filled_cells = stats.total_cells - stats.empty_cells;
  return stats;
}

MissingStats missing_stats(const Table& table) { return missing_stats(table.columns(), table.row_count()); }

ColumnName disambiguate(ColumnName name, int ordinal) {
  if (ordinal <= 1) return name;
  const auto suffix = "#" + std::to_string(ordinal);
  name.subfield = name.subfield ? *name.subfield + " " + suffix : suffix;
  return name;
}

}  // namespace forge
