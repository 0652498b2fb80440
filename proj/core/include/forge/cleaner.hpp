#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forge/table.hpp"

namespace forge::cleaner {

struct Droplist {
  std::vector<std::string> codes;  // non-state entities (world, oceans, ...)
  std::string population_body = "people-and-society-population";
};

Droplist load_droplist(const std::filesystem::path& path);

struct MnarEntry {
  std::string pattern;              // formatted column name
  std::optional<CellValue> fill;    // explicit fill; inferred from dtype when absent
};

struct MnarManifest {
  std::vector<MnarEntry> entries;

  /// Entry covering `title`: exact match first, then prefix match on
  /// `pattern + " "` for derived names.
  const MnarEntry* match(std::string_view title) const;
  bool covers(std::string_view title) const { return match(title) != nullptr; }
};

MnarManifest load_mnar_manifest(const std::filesystem::path& path);

/// Default fill for an MNAR column: 0, "None/NA" or "none" by dtype.
/// Throws TypeMismatch for enc columns or a conflicting explicit fill.
CellValue mnar_fill_for(const ColumnName& name, const std::optional<CellValue>& explicit_fill);

inline constexpr std::string_view kNoneLabel = "None/NA";
inline constexpr std::string_view kNoneText = "none";

struct ConcatFamily {
  enum class Mode { presence, valued };
  std::string body;  // columns sharing this body form the family
  ColumnName target;
  Mode mode = Mode::presence;
};

inline constexpr std::string_view kConcatDelimiter = "; ";

struct CleanerConfig {
  Droplist droplist;
  MnarManifest manifest;
  std::vector<ConcatFamily> families;
  double sparse_threshold = 0.95;
};

/// Terrorist-group and border-country families.
std::vector<ConcatFamily> default_families();

struct RowDrop {
  std::string code;
  std::string reason;
};

struct RowDropResult {
  Table table;
  std::vector<RowDrop> dropped;
  std::vector<std::string> warnings;
  std::size_t filled_cells_lost = 0;
};

RowDropResult drop_nonstate_rows(const Table& table, const Droplist& droplist);

struct ConcatResult {
  Table table;
  std::size_t source_count = 0;
  std::vector<std::string> warnings;
};

ConcatResult concat_group_columns(const Table& table, const ConcatFamily& family);

struct MnarResult {
  Table table;
  std::size_t cells_filled = 0;
  std::vector<std::string> stale_patterns;
};

MnarResult fill_mnar(const Table& table, const MnarManifest& manifest);

struct SparseResult {
  Table table;
  std::vector<std::string> dropped;
  std::size_t filled_cells_lost = 0;
};

/// Drops columns whose Missing fraction is strictly above `threshold`.
SparseResult drop_sparse_columns(const Table& table, double threshold = 0.95);

enum class CleaningStep { rows, concat, mnar, sparse };
inline constexpr std::array<CleaningStep, 4> kDefaultOrder{CleaningStep::rows, CleaningStep::concat,
                                                           CleaningStep::mnar, CleaningStep::sparse};

struct CleaningReport {
  std::vector<RowDrop> rows_dropped;
  std::map<std::string, std::size_t> columns_concatenated;  // new name -> source columns
  std::size_t mnar_cells_filled = 0;
  std::vector<std::string> mnar_stale_patterns;
  std::vector<std::string> columns_dropped;
  std::vector<std::string> warnings;

  MissingStats stats_before;
  MissingStats stats_after;
  std::map<std::string, MissingStats> stats_after_step;  // "rows", "concat", "mnar", "sparse"

  std::size_t cells_lost_to_row_drops = 0;
  std::size_t cells_lost_to_column_drops = 0;
  std::int64_t concatenation_delta = 0;  // filled-cell change caused by concatenation

  /// filled_after == filled_before - row losses - column losses + MNAR fills + concat delta
  bool accounting_holds() const noexcept;
  double empty_cell_reduction() const noexcept;
  double data_cell_loss() const noexcept;
  /// Empty cells removed by concatenation, relative to the v1 empty count.
  double concat_empty_reduction() const noexcept;
};

nlohmann::json to_json(const CleaningReport& report);

struct CleanResult {
  Table table;
  CleaningReport report;
};

/// rows -> concatenation -> MNAR -> sparse drop, unless `order` says otherwise.
CleanResult clean(const Table& v1, const CleanerConfig& config,
                  std::span<const CleaningStep> order = kDefaultOrder);

}  // namespace forge::cleaner
