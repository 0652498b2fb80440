#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/cell.hpp"
#include "forge/column_name.hpp"

namespace forge {

enum class Version { v1 = 1, v2, v3, v4, v5 };

std::string_view to_string(Version version) noexcept;
std::optional<Version> version_from_string(std::string_view s) noexcept;

struct Column {
  ColumnName name;
  std::string title;  // formatted name, the column's identity
  std::vector<CellValue> cells;

  std::size_t missing_count() const noexcept;
  bool is_complete() const noexcept { return missing_count() == 0; }

  friend bool operator==(const Column&, const Column&) = default;
};

/// Checks that a cell variant is legal for the column's dtype.
bool cell_allowed(const ColumnName& name, const CellValue& cell) noexcept;

/// Immutable, versioned columnar table keyed by lowercase country codes.
/// Build new versions through TableBuilder.
class Table {
 public:
  Table() = default;
  /// Validates shape, key and title uniqueness, and cell legality.
  Table(Version version, std::vector<std::string> row_keys, std::vector<Column> columns);

  Version version() const noexcept { return version_; }
  std::size_t row_count() const noexcept { return row_keys_.size(); }
  std::size_t column_count() const noexcept { return columns_.size(); }

  std::span<const std::string> row_keys() const noexcept { return row_keys_; }
  std::span<const Column> columns() const noexcept { return columns_; }
  const Column& column(std::size_t index) const { return columns_.at(index); }
  /// Throws std::out_of_range if the title is absent.
  const Column& column(std::string_view title) const;

  std::optional<std::size_t> find_column(std::string_view title) const;
  std::optional<std::size_t> find_row(std::string_view code) const;
  bool has_column(std::string_view title) const { return find_column(title).has_value(); }

  friend bool operator==(const Table& a, const Table& b) {
    return a.version_ == b.version_ && a.row_keys_ == b.row_keys_ && a.columns_ == b.columns_;
  }

 private:
  Version version_ = Version::v1;
  std::vector<std::string> row_keys_;
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> column_index_;
  std::unordered_map<std::string, std::size_t> row_index_;
};

/// Mutable staging area used by the pipeline stages to assemble the next
/// table version.
class TableBuilder {
 public:
  explicit TableBuilder(std::vector<std::string> row_keys);
  explicit TableBuilder(const Table& base);

  std::size_t row_count() const noexcept { return row_keys_.size(); }
  std::span<const std::string> row_keys() const noexcept { return row_keys_; }
  std::span<const Column> columns() const noexcept { return columns_; }
  std::optional<std::size_t> find_column(std::string_view title) const;
  const Column& column(std::string_view title) const;

  /// Appends a column; throws DuplicateColumn if the title exists.
  const std::string& add_column(ColumnName name, std::vector<CellValue> cells);
  const std::string& insert_column(std::size_t position, ColumnName name, std::vector<CellValue> cells);
  void remove_column(std::string_view title);
  void set_cells(std::string_view title, std::vector<CellValue> cells);
  void rename_column(std::string_view title, ColumnName name);
  /// Keeps rows whose mask entry is true, in order.
  void retain_rows(const std::vector<bool>& keep);

  Table build(Version version) &&;

 private:
  void check_cells(const ColumnName& name, const std::vector<CellValue>& cells) const;
  void reindex();

  std::vector<std::string> row_keys_;
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> column_index_;
};

struct MissingStats {
  std::size_t total_cells = 0;
  std::size_t empty_cells = 0;
  std::size_t filled_cells = 0;

  double empty_fraction() const noexcept {
    return total_cells == 0 ? 0.0 : static_cast<double>(empty_cells) / static_cast<double>(total_cells);
  }
  friend bool operator==(const MissingStats&, const MissingStats&) = default;
};

MissingStats missing_stats(const Table& table);
MissingStats missing_stats(std::span<const Column> columns, std::size_t rows);

/// Next free title for `name` given existing titles: appends " #2", " #3", ...
/// to the subfield part (before a trailing "hist").
ColumnName disambiguate(ColumnName name, int ordinal);

}  // namespace forge
