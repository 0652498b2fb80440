#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forge/parser.hpp"
#include "forge/table.hpp"

namespace forge::constructor {

enum class RuleGroup { label, amount, sum, special };

enum class SpecialId {
  climate,
  pipelines,
  service_age,
  branches,
  dependency,
  government_type,
  legal_system,
  suffrage,
  executive_head,
  ports_teus,
  unimproved,
};

std::string_view to_string(RuleGroup group) noexcept;
std::string_view to_string(SpecialId id) noexcept;

struct KeywordEntry {
  std::vector<std::string> keywords;
  std::string label;
};

struct TransformRule {
  std::string source_column;
  RuleGroup group = RuleGroup::label;
  std::vector<KeywordEntry> keyword_map;
  std::vector<std::string> item_delimiters{";", ","};
  std::vector<std::string> segment_delimiters;  // non-empty: keep the left segment first
  std::optional<SpecialId> special_id;
  bool mnar = true;  // absent input yields 0 rather than Missing
};

struct KoppenMap {
  std::vector<std::pair<std::string, std::string>> entries;  // keyword -> label, first match wins
};

struct PipelineMap {
  std::vector<std::string> canonical;                         // output order
  std::vector<std::pair<std::string, std::string>> aliases;   // raw type -> canonical
  std::string fallback = "oil/gas/water";
};

struct RuleSet {
  int version = 1;
  std::vector<TransformRule> rules;
  KoppenMap koppen;
  std::vector<std::string> climate_split_order{";", ":", ","};
  PipelineMap pipelines;
};

RuleSet parse_rules(const nlohmann::json& doc);
RuleSet load_rules(const std::filesystem::path& path);

/// A derived cell and, when the input could not be mapped, the reason.
struct Derived {
  CellValue value;
  std::string issue;
};

inline constexpr std::string_view kNoneLabel = "None/NA";

/// Missing, empty and the MNAR filler "none" all count as absent.
bool is_absent(const CellValue& cell);

/// Left-most segment after splitting at the first delimiter (in priority
/// order) that occurs in `text`.
std::string left_segment(std::string_view text, const std::vector<std::string>& priority);

/// True when `keyword` occurs in `text` bounded by non-alphanumerics.
bool contains_word(std::string_view text, std::string_view keyword);

Derived to_label(const CellValue& cell, const TransformRule& rule);
CellValue count_items(const CellValue& cell, const TransformRule& rule);
CellValue sum_items(const CellValue& cell, const TransformRule& rule);
Derived climate_label(const CellValue& cell, const RuleSet& rules);

struct PipelineOutcome {
  std::map<std::string, double> lengths;  // every canonical type, km
  double total = 0.0;
  std::vector<std::string> unknown_types;
};

PipelineOutcome pipeline_columns(const CellValue& cell, const PipelineMap& map);

struct ServiceAge {
  CellValue conscription;
  CellValue service_age;
};

ServiceAge service_age_and_conscription(const CellValue& cell);

struct ConstructResult {
  Table table;
  std::vector<parser::AuditEntry> audit;
  std::vector<std::string> generated;  // titles, append order
};

ConstructResult construct(const Table& v2, const RuleSet& rules);

}  // namespace forge::constructor
