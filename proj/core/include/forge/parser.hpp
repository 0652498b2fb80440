#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/table.hpp"

namespace forge::parser {

/// Category, field and grouping markers, as they appear in the lowercased
/// download. Matching is plain substring search.
inline constexpr std::string_view kCategoryMarker = "<div class=\"category ";
inline constexpr std::string_view kCategoryMarkerAlt = "<div class='category ";
inline constexpr std::string_view kFieldMarker = "<div class='category_data subfield";
inline constexpr std::string_view kFieldMarkerAlt = "<div class=\"category_data subfield";
inline constexpr std::string_view kSubfieldTitleMarker = "subfield-title";
inline constexpr std::string_view kGroupMarker = "subfield-name\">";

struct RawEntityDocument {
  std::string country_code;
  std::string name;
  std::string region;
  std::string raw_html;  // lowercased once on construction
  std::filesystem::path source_path;

  static RawEntityDocument make(std::string code, std::string name, std::string region, std::string_view html,
                                std::filesystem::path source = {});
};

enum class SubfieldKind { Numerical, Textual, Historical, Grouped };

std::string_view to_string(SubfieldKind kind) noexcept;

struct SubfieldRecord {
  std::string entity;
  std::string category;        // slug
  std::string field;           // slug
  std::string subfield_title;  // field title when the field has no subfields
  bool adopted_field_name = false;
  SubfieldKind kind = SubfieldKind::Textual;
  std::string payload;  // raw fragment, kept for audit
};

/// One degraded cell: a payload that could not be converted.
struct AuditEntry {
  std::string entity;
  std::string column;
  std::string reason;
  std::string raw;
};

struct IngestResult {
  std::vector<RawEntityDocument> documents;  // sorted by country code
  std::vector<std::string> warnings;         // unreadable files, skipped
};

/// Reads every `*.json` entity file in `dir`. Each file holds the page HTML
/// plus name/region/code metadata. Throws EmptyDirectory or IoError.
IngestResult ingest_directory(const std::filesystem::path& dir);

struct Fragment {
  std::string title;
  std::string_view body;  // view into the caller's document
};

/// Splits at the category marker; content before the first marker is dropped.
/// Falls back to the other quote style when a marker yields no split.
std::vector<Fragment> split_categories(std::string_view html);

/// Splits a category at the field marker. Each field takes its title from the
/// nearest preceding `field-title` element.
std::vector<Fragment> split_fields(std::string_view category);

/// Subfield records of a single field fragment. A field with no subfield
/// titles becomes one record named after the field.
std::vector<SubfieldRecord> detect_subfields(std::string_view entity, std::string_view category,
                                             std::string_view field, std::string_view fragment);

/// Kind of one subfield payload. `numeric_class` reflects the field marker's
/// class suffix (numeric or historic).
SubfieldKind classify_payload(std::string_view payload, bool numeric_class);

/// Strips notes, currency, separators and units, applies million/billion/
/// trillion multipliers, and returns the first number; nullopt if none.
std::optional<double> scrub_number(std::string_view text);

struct NumberToken {
  double value = 0.0;
  std::size_t begin = 0;  // offsets into the scanned text
  std::size_t end = 0;
};

/// Every number in `text` (already lowercased), with magnitude words applied.
std::vector<NumberToken> scan_numbers(std::string_view text);

struct DatedValue {
  int year = 0;
  double value = 0.0;
};

/// Year-stamped numeric entries, "(2017 est.)" style, in document order.
std::vector<DatedValue> dated_values(std::string_view payload);

/// Value with the greatest year; the later entry wins a tie.
std::optional<double> latest_historical(std::string_view payload);

/// Group name and scrubbed value for every `subfield-name">` group.
std::vector<std::pair<std::string, std::optional<double>>> split_grouped(std::string_view payload);

/// Text/Label cells holding n/a, na, na%, nan or $na become Missing.
CellValue normalize_na(CellValue value);
bool is_na_token(std::string_view s);

/// Where a filled v1 cell came from.
struct CellProvenance {
  std::string entity;
  std::string column;
  std::size_t record = 0;  // index into ParseResult::records
};

struct ParseResult {
  Table table;
  std::vector<SubfieldRecord> records;
  std::vector<AuditEntry> audit;
  std::vector<std::string> warnings;
  std::vector<CellProvenance> provenance;
};

/// Full marker cascade over every document; returns Table v1.
/// Throws EmptyDirectory for an empty document list.
ParseResult build_table_v1(std::span<const RawEntityDocument> documents);

void write_audit_jsonl(const std::vector<AuditEntry>& audit, const std::filesystem::path& path);

}  // namespace forge::parser
