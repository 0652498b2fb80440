#include "forge/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/text_util.hpp"

namespace forge::parser {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kFieldTitleClass = "field-title";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

/// Last `field-title` class at or before `pos`, ignoring `subfield-title`.
std::size_t rfind_field_title(std::string_view html, std::size_t pos) {
  auto found = html.rfind(kFieldTitleClass, pos);
  while (found != std::string_view::npos && found > 0 && (html[found - 1] == '-' || is_alpha(html[found - 1]))) {
    found = html.rfind(kFieldTitleClass, found - 1);
  }
  return found;
}

std::vector<std::size_t> find_all(std::string_view haystack, std::string_view needle) {
  std::vector<std::size_t> out;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) {
    out.push_back(pos);
  }
  return out;
}

/// Text from the end of the tag opened at `tag_pos` up to the next '<'.
std::string element_text(std::string_view html, std::size_t tag_pos) {
  const auto tag_end = html.find('>', tag_pos);
  if (tag_end == std::string_view::npos) return {};
  const auto next = html.find('<', tag_end + 1);
  return text::clean_text(html.substr(tag_end + 1, next == std::string_view::npos ? std::string_view::npos
                                                                                  : next - tag_end - 1));
}

/// Text of the div opened at `tag_pos`, inner markup removed.
std::string div_text(std::string_view html, std::size_t tag_pos) {
  const auto close = html.find("</div>", tag_pos);
  return text::clean_text(html.substr(tag_pos, close == std::string_view::npos ? std::string_view::npos
                                                                             : close - tag_pos));
}

std::string strip_title_punctuation(std::string s) {
  while (!s.empty() && (s.back() == ':' || s.back() == ' ')) s.pop_back();
  return s;
}

/// Position of the first occurrence of `marker`, falling back to `alt`.
std::string_view pick_marker(std::string_view html, std::string_view marker, std::string_view alt) {
  if (html.find(marker) != std::string_view::npos) return marker;
  if (html.find(alt) != std::string_view::npos) return alt;
  return marker;
}

/// Class suffix of the field marker opened at `pos`, e.g. "numeric".
std::string marker_class(std::string_view html, std::size_t pos, std::string_view marker) {
  const auto start = pos + marker.size();
  const auto end = html.find_first_of("'\">", start);
  return std::string(text::trim(html.substr(start, end == std::string_view::npos ? 0 : end - start)));
}

bool numeric_class(std::string_view cls) {
  return text::contains(cls, "numeric") || text::contains(cls, "historic");
}

/// Whether the text right after a stamp's value looks like a measurement.
bool starts_numeric(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == '$' || s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (!s.empty() && s.front() == '.') s.remove_prefix(1);
  return !s.empty() && is_digit(s.front());
}

std::optional<int> stamp_year(std::string_view inside) {
  for (std::size_t i = 0; i + 4 <= inside.size(); ++i) {
    if (!is_digit(inside[i]) || !is_digit(inside[i + 1]) || !is_digit(inside[i + 2]) || !is_digit(inside[i + 3])) {
      continue;
    }
    const bool left_ok = i == 0 || !is_digit(inside[i - 1]);
    const bool right_ok = i + 4 == inside.size() || !is_digit(inside[i + 4]);
    if (!left_ok || !right_ok) continue;
    const int year = std::stoi(std::string(inside.substr(i, 4)));
    if (year >= 1800 && year <= 2199) return year;
  }
  return std::nullopt;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_string(const json& doc, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (doc.contains(key) && doc[key].is_string()) return doc[key].get<std::string>();
  }
  return {};
}

}  // namespace

RawEntityDocument RawEntityDocument::make(std::string code, std::string name, std::string region,
                                          std::string_view html, fs::path source) {
  RawEntityDocument doc;
  doc.country_code = text::to_lower(text::trim(code));
  doc.name = text::to_lower(text::trim(name));
  doc.region = text::to_lower(text::trim(region));
  doc.raw_html = text::to_lower(html);
  doc.source_path = std::move(source);
  return doc;
}

std::string_view to_string(SubfieldKind kind) noexcept {
  switch (kind) {
    case SubfieldKind::Numerical: return "Numerical";
    case SubfieldKind::Textual: return "Textual";
    case SubfieldKind::Historical: return "Historical";
    case SubfieldKind::Grouped: return "Grouped";
  }
  return "Textual";
}

IngestResult ingest_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::IoError, "not a directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorKind::EmptyDirectory, "no entity files in " + dir.string());
  std::sort(files.begin(), files.end());

  IngestResult result;
  for (const auto& path : files) {
    try {
      const auto doc = json::parse(read_file(path));
      if (!doc.is_object()) throw std::runtime_error("not a JSON object");
      auto html = first_string(doc, {"html", "content", "data"});
      if (html.empty()) throw std::runtime_error("no html payload");
      auto code = first_string(doc, {"code", "country_code"});
      if (code.empty()) code = path.stem().string();
      result.documents.push_back(RawEntityDocument::make(std::move(code), first_string(doc, {"name", "country_name"}),
                                                         first_string(doc, {"region"}), html, path));
    } catch (const std::exception& e) {
      result.warnings.push_back("skipped " + path.filename().string() + ": " + e.what());
    }
  }
  std::stable_sort(result.documents.begin(), result.documents.end(),
                   [](const auto& a, const auto& b) { return a.country_code < b.country_code; });
  return result;
}

std::vector<Fragment> split_categories(std::string_view html) {
  const auto marker = pick_marker(html, kCategoryMarker, kCategoryMarkerAlt);
  const auto positions = find_all(html, marker);
  std::vector<Fragment> out;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto begin = positions[i];
    const auto end = i + 1 < positions.size() ? positions[i + 1] : html.size();
    const auto body = html.substr(begin, end - begin);

    // Title: text of the marker element, up to its closing tag or the first field.
    std::string title;
    const auto tag_end = body.find('>');
    if (tag_end != std::string_view::npos) {
      auto stop = body.find("</div>", tag_end);
      stop = std::min(stop, std::min(body.find(kFieldMarker, tag_end), body.find(kFieldMarkerAlt, tag_end)));
      title = text::slugify(text::clean_text(body.substr(tag_end + 1, stop == std::string_view::npos
                                                                          ? std::string_view::npos
                                                                          : stop - tag_end - 1)));
    }
    out.push_back(Fragment{std::move(title), body});
  }
  return out;
}

std::vector<Fragment> split_fields(std::string_view category) {
  const auto marker = pick_marker(category, kFieldMarker, kFieldMarkerAlt);
  const auto positions = find_all(category, marker);
  std::vector<Fragment> out;
  if (positions.empty()) return out;

  // Consecutive markers under the same title element form one field.
  std::optional<std::size_t> current_title_pos;
  std::size_t field_begin = 0;
  std::string current_title;
  bool open = false;

  for (std::size_t i = 0; i <= positions.size(); ++i) {
    const auto pos = i < positions.size() ? positions[i] : category.size();
    std::optional<std::size_t> title_pos;
    if (i < positions.size()) {
      const auto found = rfind_field_title(category, pos);
      if (found != std::string_view::npos) title_pos = found;
    }
    const bool same_field = open && i < positions.size() && title_pos == current_title_pos;
    if (same_field) continue;
    if (open) {
      // Close the previous field right before the next field's title element.
      auto end = pos;
      if (i < positions.size() && title_pos && *title_pos > field_begin) {
        const auto tag_start = category.rfind('<', *title_pos);
        end = tag_start != std::string_view::npos && tag_start > field_begin ? tag_start : *title_pos;
      }
      out.push_back(Fragment{current_title, category.substr(field_begin, end - field_begin)});
      open = false;
    }
    if (i == positions.size()) break;
    current_title_pos = title_pos;
    field_begin = pos;
    open = true;
    if (title_pos) {
      const auto tag_start = category.rfind('<', *title_pos);
      current_title = text::slugify(strip_title_punctuation(div_text(category, tag_start)));
    } else {
      current_title.clear();
    }
    if (current_title.empty()) current_title = "field";
  }
  return out;
}

SubfieldKind classify_payload(std::string_view payload, bool numeric) {
  if (payload.find(kGroupMarker) != std::string_view::npos) return SubfieldKind::Grouped;
  if (dated_values(payload).size() >= 2) return SubfieldKind::Historical;
  if (numeric) return SubfieldKind::Numerical;
  return SubfieldKind::Textual;
}

std::vector<SubfieldRecord> detect_subfields(std::string_view entity, std::string_view category,
                                             std::string_view field, std::string_view fragment) {
  const auto marker = pick_marker(fragment, kFieldMarker, kFieldMarkerAlt);
  const auto markers = find_all(fragment, marker);
  auto numeric_at = [&](std::size_t pos) {
    bool numeric = false;
    for (auto m : markers) {
      if (m > pos) break;
      numeric = numeric_class(marker_class(fragment, m, marker));
    }
    return numeric;
  };

  std::vector<SubfieldRecord> out;
  const auto titles = find_all(fragment, kSubfieldTitleMarker);
  if (titles.empty()) {
    const auto body_start = markers.empty() ? 0 : fragment.find('>', markers.front());
    const auto payload = fragment.substr(body_start == std::string_view::npos ? 0 : body_start + 1);
    out.push_back(SubfieldRecord{std::string(entity), std::string(category), std::string(field), std::string(field),
                                 true, classify_payload(payload, numeric_at(0)), std::string(payload)});
    return out;
  }

  for (std::size_t i = 0; i < titles.size(); ++i) {
    const auto tag_start = fragment.rfind('<', titles[i]);
    auto title = strip_title_punctuation(element_text(fragment, tag_start == std::string_view::npos ? 0 : tag_start));
    const auto title_close = fragment.find("</", titles[i]);
    auto payload_start = title_close == std::string_view::npos ? titles[i] : fragment.find('>', title_close);
    payload_start = payload_start == std::string_view::npos ? fragment.size() : payload_start + 1;
    auto payload_end = fragment.size();
    if (i + 1 < titles.size()) {
      const auto next_tag = fragment.rfind('<', titles[i + 1]);
      payload_end = next_tag != std::string_view::npos && next_tag >= payload_start ? next_tag : titles[i + 1];
    }
    const auto payload = fragment.substr(payload_start, payload_end - payload_start);
    if (title.empty()) title = std::string(field);
    out.push_back(SubfieldRecord{std::string(entity), std::string(category), std::string(field), std::move(title),
                                 false, classify_payload(payload, numeric_at(titles[i])), std::string(payload)});
  }
  return out;
}

std::vector<NumberToken> scan_numbers(std::string_view s) {
  std::vector<NumberToken> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool digit_start = is_digit(s[i]);
    const bool dot_start = s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1]);
    if (!digit_start && !dot_start) continue;
    // Part of a word such as "g20"? Skip the whole token.
    if (i > 0 && is_alpha(s[i - 1])) {
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      continue;
    }

    bool negative = i > 0 && s[i - 1] == '-' && (i < 2 || !std::isalnum(static_cast<unsigned char>(s[i - 2])));
    std::string digits;
    std::size_t j = i;
    while (j < s.size()) {
      if (is_digit(s[j])) {
        digits += s[j++];
      } else if (s[j] == ',' && j + 3 < s.size() && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
                 is_digit(s[j + 3]) && (j + 4 >= s.size() || !is_digit(s[j + 4]))) {
        ++j;
      } else {
        break;
      }
    }
    if (j < s.size() && s[j] == '.' && j + 1 < s.size() && is_digit(s[j + 1])) {
      digits += '.';
      ++j;
      while (j < s.size() && is_digit(s[j])) digits += s[j++];
    }
    if (digits.empty() || digits == ".") {
      i = j;
      continue;
    }

    std::size_t end = j;
    const auto after = s.substr(j);
    const auto rest = text::trim(after);
    const auto skipped = after.size() - rest.size();
    // Exponent suffix keeps "361.132 million" exact after rounding.
    for (const auto& [word, exponent] : {std::pair{std::string_view("trillion"), "e12"},
                                         std::pair{std::string_view("billion"), "e9"},
                                         std::pair{std::string_view("million"), "e6"}}) {
      if (rest.starts_with(word)) {
        digits += exponent;
        end = j + skipped + word.size();
        break;
      }
    }
    double value = std::stod(digits);
    if (negative) value = -value;
    out.push_back(NumberToken{value, negative ? i - 1 : i, end});
    i = j == 0 ? 0 : j - 1;
  }
  return out;
}

std::optional<double> scrub_number(std::string_view raw) {
  const auto lowered = text::to_lower(raw);
  const auto tokens = scan_numbers(text::truncate_at_note(lowered));
  if (tokens.empty()) return std::nullopt;
  return tokens.front().value;
}

std::vector<DatedValue> dated_values(std::string_view payload) {
  const auto cleaned = text::clean_text(payload);
  const std::string_view s = text::truncate_at_note(cleaned);
  std::vector<DatedValue> out;
  std::size_t segment_start = 0;
  std::size_t pos = 0;
  while ((pos = s.find('(', pos)) != std::string_view::npos) {
    const auto close = s.find(')', pos);
    if (close == std::string_view::npos) break;
    const auto year = stamp_year(s.substr(pos + 1, close - pos - 1));
    if (year) {
      const auto segment = s.substr(segment_start, pos - segment_start);
      if (starts_numeric(segment)) {
        if (const auto value = scrub_number(segment)) out.push_back(DatedValue{*year, *value});
      }
      segment_start = close + 1;
    }
    pos = close + 1;
  }
  return out;
}

std::optional<double> latest_historical(std::string_view payload) {
  const auto entries = dated_values(payload);
  if (entries.empty()) {
    // Single undated value still counts.
    return scrub_number(text::clean_text(payload));
  }
  const DatedValue* best = &entries.front();
  for (const auto& e : entries) {
    if (e.year >= best->year) best = &e;
  }
  return best->value;
}

std::vector<std::pair<std::string, std::optional<double>>> split_grouped(std::string_view payload) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  const auto positions = find_all(payload, kGroupMarker);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto start = positions[i] + kGroupMarker.size();
    const auto end = i + 1 < positions.size() ? positions[i + 1] : payload.size();
    auto chunk = payload.substr(start, end - start);
    // Drop the opening of the next group's element, e.g. `<span class="`.
    if (i + 1 < positions.size()) {
      const auto lt = chunk.rfind('<');
      if (lt != std::string_view::npos && chunk.find('>', lt) == std::string_view::npos) chunk = chunk.substr(0, lt);
    }
    const auto name_end = chunk.find('<');
    auto name = strip_title_punctuation(text::clean_text(chunk.substr(0, name_end)));
    auto value_text = name_end == std::string_view::npos ? std::string{} : text::clean_text(chunk.substr(name_end));
    while (!value_text.empty() && (value_text.back() == ',' || value_text.back() == ';')) value_text.pop_back();
    if (name.empty()) continue;
    std::optional<double> value;
    if (!is_na_token(value_text)) value = scrub_number(value_text);
    out.emplace_back(std::move(name), value);
  }
  return out;
}

bool is_na_token(std::string_view s) {
  const auto t = text::to_lower(text::trim(s));
  return t == "n/a" || t == "na" || t == "na%" || t == "nan" || t == "$na";
}

CellValue normalize_na(CellValue value) {
  if ((value.is_text() || value.is_label()) && is_na_token(value.string_payload())) return Missing{};
  return value;
}

namespace {

struct PendingColumn {
  ColumnName name;
  std::map<std::size_t, CellValue> cells;  // row -> value
};

class V1Assembler {
 public:
  explicit V1Assembler(std::size_t rows) : rows_(rows) {}

  void put(std::size_t row, ColumnName name, CellValue value, std::size_t record, ParseResult& result,
           std::map<std::string, int>& seen_in_entity, const std::string& entity) {
    auto base_title = format_column_name(name);
    const int ordinal = ++seen_in_entity[base_title];
    name = disambiguate(std::move(name), ordinal);
    auto title = format_column_name(name);

    value = normalize_na(std::move(value));
    auto it = index_.find(title);
    if (it == index_.end()) {
      it = index_.emplace(title, columns_.size()).first;
      columns_.push_back(PendingColumn{name, {}});
    }
    if (value.is_missing()) return;
    columns_[it->second].cells[row] = std::move(value);
    result.provenance.push_back(CellProvenance{entity, title, record});
  }

  std::vector<Column> finish() {
    std::vector<Column> out;
    for (auto& pending : columns_) {
      if (pending.cells.empty()) continue;
      Column column{pending.name, format_column_name(pending.name), std::vector<CellValue>(rows_)};
      for (auto& [row, value] : pending.cells) column.cells[row] = std::move(value);
      out.push_back(std::move(column));
    }
    return out;
  }

 private:
  std::size_t rows_;
  std::vector<PendingColumn> columns_;
  std::unordered_map<std::string, std::size_t> index_;
};

ColumnName record_name(const SubfieldRecord& record, Dtype dtype) {
  ColumnName name;
  name.dtype = dtype;
  name.body = record.category.empty() ? record.field : record.category + "-" + record.field;
  if (!record.adopted_field_name) name.subfield = record.subfield_title;
  return name;
}

}  // namespace

ParseResult build_table_v1(std::span<const RawEntityDocument> documents) {
  if (documents.empty()) throw Error(ErrorKind::EmptyDirectory, "no entity documents to parse");

  std::vector<const RawEntityDocument*> ordered;
  for (const auto& doc : documents) ordered.push_back(&doc);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->country_code < b->country_code; });

  ParseResult result;
  std::vector<std::string> keys;
  for (const auto* doc : ordered) keys.push_back(doc->country_code);

  std::vector<CellValue> codes, names, regions;
  V1Assembler assembler(keys.size());

  for (std::size_t row = 0; row < ordered.size(); ++row) {
    const auto& doc = *ordered[row];
    const auto& entity = doc.country_code;
    codes.emplace_back(Text{entity});
    names.push_back(doc.name.empty() ? CellValue{} : normalize_na(Text{doc.name}));
    regions.push_back(doc.region.empty() ? CellValue{} : normalize_na(Label{doc.region}));

    std::map<std::string, int> seen;
    const auto categories = split_categories(doc.raw_html);
    if (categories.empty()) {
      result.warnings.push_back(entity + ": no categories found");
      continue;
    }
    for (const auto& category : categories) {
      for (const auto& field : split_fields(category.body)) {
        for (auto& record : detect_subfields(entity, category.title, field.title, field.body)) {
          const auto index = result.records.size();
          result.records.push_back(record);
          const auto& rec = result.records.back();
          auto degrade = [&](const std::string& column, std::string reason) {
            result.audit.push_back(AuditEntry{entity, column, std::move(reason), text::clean_text(rec.payload)});
          };

          switch (rec.kind) {
            case SubfieldKind::Textual: {
              auto name = record_name(rec, Dtype::txt);
              auto value = text::clean_text(rec.payload);
              if (value.empty()) {
                degrade(format_column_name(name), "empty text");
                assembler.put(row, std::move(name), Missing{}, index, result, seen, entity);
              } else {
                if (is_na_token(value)) degrade(format_column_name(name), "na token");
                assembler.put(row, std::move(name), Text{std::move(value)}, index, result, seen, entity);
              }
              break;
            }
            case SubfieldKind::Numerical: {
              auto name = record_name(rec, Dtype::num);
              const auto value = scrub_number(text::clean_text(rec.payload));
              if (!value) degrade(format_column_name(name), "no number");
              assembler.put(row, std::move(name), value ? CellValue(*value) : CellValue{}, index, result, seen,
                            entity);
              break;
            }
            case SubfieldKind::Historical: {
              auto name = record_name(rec, Dtype::num);
              name.hist = true;
              const auto value = latest_historical(rec.payload);
              if (!value) degrade(format_column_name(name), "no dated value");
              assembler.put(row, std::move(name), value ? CellValue(*value) : CellValue{}, index, result, seen,
                            entity);
              break;
            }
            case SubfieldKind::Grouped: {
              for (auto& [group, value] : split_grouped(rec.payload)) {
                auto name = record_name(rec, Dtype::num);
                name.subfield = group;
                if (!value) degrade(format_column_name(name), "no number in group");
                assembler.put(row, std::move(name), value ? CellValue(*value) : CellValue{}, index, result, seen,
                              entity);
              }
              break;
            }
          }
        }
      }
    }
  }

  std::vector<Column> columns;
  columns.push_back(Column{ColumnName::country_code(), std::string(kCountryCodeColumn), std::move(codes)});
  columns.push_back(Column{ColumnName::country_name(), std::string(kCountryNameColumn), std::move(names)});
  columns.push_back(Column{ColumnName::region(), std::string(kRegionColumn), std::move(regions)});
  for (auto& column : assembler.finish()) columns.push_back(std::move(column));

  result.table = Table(Version::v1, std::move(keys), std::move(columns));
  return result;
}

void write_audit_jsonl(const std::vector<AuditEntry>& audit, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  for (const auto& entry : audit) {
    out << json{{"entity", entry.entity}, {"column", entry.column}, {"reason", entry.reason}, {"raw", entry.raw}}.dump()
        << '\n';
  }
}

}  // namespace forge::parser
