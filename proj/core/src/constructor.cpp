#include "forge/constructor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/text_util.hpp"

namespace forge::constructor {
namespace {

using nlohmann::json;

constexpr std::pair<RuleGroup, std::string_view> kGroups[] = {
    {RuleGroup::label, "label"}, {RuleGroup::amount, "amount"}, {RuleGroup::sum, "sum"}, {RuleGroup::special, "special"}};

constexpr std::pair<SpecialId, std::string_view> kSpecials[] = {
    {SpecialId::climate, "climate"},
    {SpecialId::pipelines, "pipelines"},
    {SpecialId::service_age, "service_age"},
    {SpecialId::branches, "branches"},
    {SpecialId::dependency, "dependency"},
    {SpecialId::government_type, "government_type"},
    {SpecialId::legal_system, "legal_system"},
    {SpecialId::suffrage, "suffrage"},
    {SpecialId::executive_head, "executive_head"},
    {SpecialId::ports_teus, "ports_teus"},
    {SpecialId::unimproved, "unimproved"},
};

template <typename Enum, std::size_t N>
Enum lookup(const std::pair<Enum, std::string_view> (&table)[N], std::string_view key, std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == key) return value;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown " + std::string(what) + " '" + std::string(key) + "'");
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lowered_text(const CellValue& cell) {
  return text::to_lower(text::trim(cell.string_payload()));
}

CellValue label(std::string value) { return CellValue::label(std::move(value)); }
CellValue none_label() { return label(std::string(kNoneLabel)); }

/// Keyword/label pairs ordered longest keyword first; ties keep config order.
std::vector<std::pair<std::string, std::string>> ordered_keywords(const std::vector<KeywordEntry>& map) {
  std::vector<std::pair<std::string, std::string>> flat;
  for (const auto& entry : map) {
    for (const auto& keyword : entry.keywords) flat.emplace_back(text::to_lower(keyword), entry.label);
  }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  return flat;
}

/// "1,200" -> "1200" so thousands separators are not taken as item delimiters.
std::string drop_digit_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    }
    out += s[i];
  }
  return out;
}

std::size_t item_count(std::string_view raw, const std::vector<std::string>& delimiters) {
  const auto cleaned = drop_digit_commas(text::truncate_at_note(raw));
  std::size_t count = 0;
  for (const auto& item : text::split_top_level(cleaned, delimiters)) {
    const auto bare = text::strip_parentheticals(item);
    if (!text::trim(bare).empty() && text::trim(bare) != "none") ++count;
  }
  return count;
}

/// Sum over scanned numbers; "a-b" ranges contribute max(a, b).
double sum_numbers(std::string_view s) {
  const auto tokens = parser::scan_numbers(s);
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    double value = tokens[i].value;
    while (i + 1 < tokens.size()) {
      const auto gap = text::trim(s.substr(tokens[i].end, tokens[i + 1].begin - tokens[i].end));
      const bool joined = gap == "-" || gap == "to" || (gap.empty() && s[tokens[i + 1].begin] == '-');
      if (!joined) break;
      value = std::max(value, std::abs(tokens[i + 1].value));
      ++i;
    }
    total += value;
  }
  return total;
}

std::optional<int> first_integer(std::string_view s) {
  const auto tokens = parser::scan_numbers(s);
  if (tokens.empty()) return std::nullopt;
  return static_cast<int>(std::abs(tokens.front().value));
}

std::string format_integer(int v) { return std::to_string(v); }

}  // namespace

std::string_view to_string(RuleGroup group) noexcept {
  for (const auto& [value, name] : kGroups) {
    if (value == group) return name;
  }
  return "label";
}

std::string_view to_string(SpecialId id) noexcept {
  for (const auto& [value, name] : kSpecials) {
    if (value == id) return name;
  }
  return "climate";
}

RuleSet parse_rules(const json& doc) {
  RuleSet out;
  try {
    out.version = doc.value("version", 1);
    if (doc.contains("climate")) {
      const auto& climate = doc["climate"];
      if (climate.contains("split_order")) out.climate_split_order = climate["split_order"].get<std::vector<std::string>>();
      for (const auto& entry : climate.value("koppen", json::array())) {
        out.koppen.entries.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<std::string>());
      }
    }
    if (doc.contains("pipelines")) {
      const auto& p = doc["pipelines"];
      out.pipelines.canonical = p.value("canonical", std::vector<std::string>{});
      out.pipelines.fallback = p.value("fallback", out.pipelines.fallback);
      const auto aliases = p.value("aliases", json::object());
      for (const auto& [canonical, raws] : aliases.items()) {
        for (const auto& raw : raws) out.pipelines.aliases.emplace_back(raw.get<std::string>(), canonical);
      }
    }
    for (const auto& r : doc.at("rules")) {
      TransformRule rule;
      rule.source_column = r.at("source").get<std::string>();
      rule.group = lookup(kGroups, r.at("group").get<std::string>(), "rule group");
      if (r.contains("special")) rule.special_id = lookup(kSpecials, r["special"].get<std::string>(), "special rule");
      for (const auto& k : r.value("keywords", json::array())) {
        rule.keyword_map.push_back(
            KeywordEntry{k.at("match").get<std::vector<std::string>>(), k.at("label").get<std::string>()});
      }
      if (r.contains("delimiters")) rule.item_delimiters = r["delimiters"].get<std::vector<std::string>>();
      if (r.contains("segment")) rule.segment_delimiters = r["segment"].get<std::vector<std::string>>();
      rule.mnar = r.value("mnar", true);
      if (rule.group == RuleGroup::special && !rule.special_id) {
        throw Error(ErrorKind::ConfigInvalid, "special rule without id: " + rule.source_column);
      }
      parse_column_name(rule.source_column);
      out.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("transform rules: ") + e.what());
  }
  return out;
}

RuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  try {
    return parse_rules(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
}

bool is_absent(const CellValue& cell) {
  if (cell.is_missing()) return true;
  if (!cell.is_text() && !cell.is_label()) return false;
  const auto t = text::trim(cell.string_payload());
  return t.empty() || text::to_lower(t) == "none";
}

std::string left_segment(std::string_view text, const std::vector<std::string>& priority) {
  for (const auto& delimiter : priority) {
    const auto pos = text.find(delimiter);
    if (pos != std::string_view::npos) return std::string(text::trim(text.substr(0, pos)));
  }
  return std::string(text::trim(text));
}

bool contains_word(std::string_view text, std::string_view keyword) {
  if (keyword.empty()) return false;
  std::size_t pos = 0;
  while ((pos = text.find(keyword, pos)) != std::string_view::npos) {
    const bool left = pos == 0 || !is_alnum(text[pos - 1]);
    const auto end = pos + keyword.size();
    const bool right = end >= text.size() || !is_alnum(text[end]);
    if (left && right) return true;
    ++pos;
  }
  return false;
}

Derived to_label(const CellValue& cell, const TransformRule& rule) {
  if (is_absent(cell)) return {none_label(), {}};
  auto subject = lowered_text(cell);
  if (!rule.segment_delimiters.empty()) subject = left_segment(subject, rule.segment_delimiters);
  if (rule.keyword_map.empty()) {
    const auto natural = std::string(text::trim(text::strip_parentheticals(subject)));
    if (natural.empty()) return {none_label(), "NoKeywordMatch"};
    return {label(natural), {}};
  }
  for (const auto& [keyword, out] : ordered_keywords(rule.keyword_map)) {
    if (contains_word(subject, keyword)) return {label(out), {}};
  }
  return {none_label(), "NoKeywordMatch"};
}

CellValue count_items(const CellValue& cell, const TransformRule& rule) {
  if (is_absent(cell)) return rule.mnar ? CellValue(0.0) : CellValue(Missing{});
  return CellValue(static_cast<double>(item_count(lowered_text(cell), rule.item_delimiters)));
}

CellValue sum_items(const CellValue& cell, const TransformRule& rule) {
  const auto fallback = rule.mnar ? CellValue(0.0) : CellValue(Missing{});
  if (is_absent(cell)) return fallback;
  if (cell.is_number()) return cell;
  const auto lowered = lowered_text(cell);
  const auto stripped = text::strip_parentheticals(text::truncate_at_note(lowered));
  if (parser::scan_numbers(stripped).empty()) return fallback;
  return CellValue(sum_numbers(stripped));
}

Derived climate_label(const CellValue& cell, const RuleSet& rules) {
  if (is_absent(cell)) return {none_label(), {}};
  const auto segment = left_segment(lowered_text(cell), rules.climate_split_order);
  for (const auto& [keyword, out] : rules.koppen.entries) {
    if (text::contains(segment, keyword)) return {label(out), {}};
  }
  return {none_label(), "NoKeywordMatch"};
}

PipelineOutcome pipeline_columns(const CellValue& cell, const PipelineMap& map) {
  PipelineOutcome out;
  for (const auto& c : map.canonical) out.lengths[c] = 0.0;
  if (is_absent(cell)) return out;

  static const std::regex clause(R"((\d[\d,]*(?:\.\d+)?)\s*km\s+([^;,()]+))");
  const auto s = std::string(text::truncate_at_note(lowered_text(cell)));
  for (auto it = std::sregex_iterator(s.begin(), s.end(), clause); it != std::sregex_iterator(); ++it) {
    auto digits = (*it)[1].str();
    std::erase(digits, ',');
    const double length = std::stod(digits);
    const auto raw_type = std::string(text::trim((*it)[2].str()));
    std::string canonical;
    for (const auto& [alias, target] : map.aliases) {
      if (alias == raw_type) {
        canonical = target;
        break;
      }
    }
    if (canonical.empty() && std::find(map.canonical.begin(), map.canonical.end(), raw_type) != map.canonical.end()) {
      canonical = raw_type;
    }
    if (canonical.empty()) {
      out.unknown_types.push_back(raw_type);
      canonical = map.fallback;
    }
    out.lengths[canonical] += length;
    out.total += length;
  }
  return out;
}

ServiceAge service_age_and_conscription(const CellValue& cell) {
  if (is_absent(cell)) return {none_label(), none_label()};
  const auto lowered = lowered_text(cell);
  const auto body = text::strip_parentheticals(text::truncate_at_note(lowered));

  CellValue conscription = none_label();
  if (text::contains(body, "no conscription") || text::contains(body, "no compulsory")) {
    conscription = label("no");
  } else if (text::contains(body, "compulsory")) {
    conscription = label("yes");
  }

  CellValue age = none_label();
  const auto segment = left_segment(body, {";"});
  const auto tokens = parser::scan_numbers(segment);
  bool under_15 = false;
  for (const auto& t : tokens) under_15 = under_15 || std::abs(t.value) < 15.0;
  if (under_15) {
    age = label("none");
  } else if (const auto first = first_integer(segment)) {
    age = label(format_integer(*first));
  }
  return {std::move(conscription), std::move(age)};
}

namespace {

struct Output {
  ColumnName name;
  std::vector<CellValue> cells;
};

class RuleRunner {
 public:
  RuleRunner(const Table& table, const RuleSet& rules, std::vector<parser::AuditEntry>& audit)
      : table_(table), rules_(rules), audit_(audit) {}

  std::vector<Output> run(const TransformRule& rule, const Column& source) {
    const auto n = table_.row_count();
    auto named = [&](Dtype dtype, std::optional<std::string> subfield = std::nullopt) {
      auto name = with_dtype(source.name, dtype);
      name.hist = source.name.hist;
      if (subfield) name.subfield = std::move(subfield);
      return Output{std::move(name), std::vector<CellValue>(n)};
    };

    std::vector<Output> outs;
    const auto special = rule.group == RuleGroup::special ? rule.special_id : std::nullopt;
    if (!special) {
      const auto dtype = rule.group == RuleGroup::label ? Dtype::lbl
                         : rule.group == RuleGroup::amount ? Dtype::amount
                                                           : Dtype::sum;
      outs.push_back(named(dtype));
      for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = source.cells[r];
        if (rule.group == RuleGroup::label) {
          auto d = to_label(cell, rule);
          note(r, outs[0].name, d.issue, cell);
          outs[0].cells[r] = std::move(d.value);
        } else if (rule.group == RuleGroup::amount) {
          outs[0].cells[r] = count_items(cell, rule);
        } else {
          outs[0].cells[r] = sum_items(cell, rule);
        }
      }
      return outs;
    }

    switch (*special) {
      case SpecialId::climate:
        outs.push_back(named(Dtype::lbl));
        for (std::size_t r = 0; r < n; ++r) {
          auto d = climate_label(source.cells[r], rules_);
          note(r, outs[0].name, d.issue, source.cells[r]);
          outs[0].cells[r] = std::move(d.value);
        }
        break;
      case SpecialId::pipelines: {
        outs.push_back(named(Dtype::sum));
        for (const auto& type : rules_.pipelines.canonical) outs.push_back(named(Dtype::sum, type));
        for (std::size_t r = 0; r < n; ++r) {
          const auto p = pipeline_columns(source.cells[r], rules_.pipelines);
          for (const auto& unknown : p.unknown_types) note(r, outs[0].name, "UnknownPipelineType: " + unknown, source.cells[r]);
          outs[0].cells[r] = CellValue(p.total);
          for (std::size_t i = 0; i < rules_.pipelines.canonical.size(); ++i) {
            outs[i + 1].cells[r] = CellValue(p.lengths.at(rules_.pipelines.canonical[i]));
          }
        }
        break;
      }
      case SpecialId::service_age:
        outs.push_back(named(Dtype::lbl, "conscription"));
        outs.push_back(named(Dtype::lbl, "service age"));
        for (std::size_t r = 0; r < n; ++r) {
          auto s = service_age_and_conscription(source.cells[r]);
          outs[0].cells[r] = std::move(s.conscription);
          outs[1].cells[r] = std::move(s.service_age);
        }
        break;
      case SpecialId::branches:
        outs.push_back(named(Dtype::amount));
        for (std::size_t r = 0; r < n; ++r) {
          const auto& cell = source.cells[r];
          const bool none = !is_absent(cell) && text::contains(lowered_text(cell), "no regular");
          outs[0].cells[r] = none ? CellValue(0.0) : count_items(cell, rule);
        }
        break;
      case SpecialId::dependency:
        outs.push_back(named(Dtype::lbl));
        for (std::size_t r = 0; r < n; ++r) {
          outs[0].cells[r] = label(is_absent(source.cells[r]) ? "self-sovereign" : "dependent");
        }
        break;
      case SpecialId::government_type:
        outs.push_back(named(Dtype::lbl));
        for (std::size_t r = 0; r < n; ++r) {
          const auto& cell = source.cells[r];
          if (!is_absent(cell)) {
            const auto full = lowered_text(cell);
            std::optional<std::string> override;
            if (contains_word(full, "totalitarian")) override = "totalitarian";
            else if (contains_word(full, "dictatorship")) override = "dictatorship";
            else if (contains_word(left_segment(full, {";"}), "unresolved")) override = "in transition";
            if (override) {
              outs[0].cells[r] = label(*override);
              continue;
            }
          }
          auto d = to_label(cell, rule);
          note(r, outs[0].name, d.issue, cell);
          outs[0].cells[r] = std::move(d.value);
        }
        break;
      case SpecialId::legal_system:
      case SpecialId::executive_head:
        outs.push_back(named(Dtype::lbl));
        for (std::size_t r = 0; r < n; ++r) {
          auto d = to_label(source.cells[r], rule);
          note(r, outs[0].name, d.issue, source.cells[r]);
          outs[0].cells[r] = std::move(d.value);
        }
        break;
      case SpecialId::suffrage:
        outs.push_back(named(Dtype::lbl));
        for (std::size_t r = 0; r < n; ++r) {
          const auto& cell = source.cells[r];
          if (is_absent(cell)) {
            outs[0].cells[r] = none_label();
            continue;
          }
          const auto segment = left_segment(lowered_text(cell), {";"});
          if (const auto age = first_integer(segment)) {
            outs[0].cells[r] = label(format_integer(*age));
          } else {
            note(r, outs[0].name, "NoKeywordMatch", cell);
            outs[0].cells[r] = none_label();
          }
        }
        break;
      case SpecialId::ports_teus:
        outs.push_back(named(Dtype::amount));
        outs.push_back(named(Dtype::sum));
        for (std::size_t r = 0; r < n; ++r) {
          const auto& cell = source.cells[r];
          outs[0].cells[r] = count_items(cell, rule);
          outs[1].cells[r] = teu_total(cell, rule.mnar);
        }
        break;
      case SpecialId::unimproved:
        outs.push_back(named(Dtype::num));
        for (std::size_t r = 0; r < n; ++r) outs[0].cells[r] = unimproved_value(source.cells[r], rule.mnar);
        break;
    }
    return outs;
  }

 private:
  void note(std::size_t row, const ColumnName& column, const std::string& issue, const CellValue& raw) {
    if (issue.empty()) return;
    audit_.push_back(parser::AuditEntry{table_.row_keys()[row], format_column_name(column), issue,
                                        raw.is_missing() ? std::string() : raw.string_payload()});
  }

  /// "busan (21,992,001)(2017), incheon (3,048,000)(2017)": sums the
  /// parenthesised volumes and ignores bare year stamps.
  static CellValue teu_total(const CellValue& cell, bool mnar) {
    if (is_absent(cell)) return mnar ? CellValue(0.0) : CellValue(Missing{});
    const auto s = std::string(text::truncate_at_note(lowered_text(cell)));
    static const std::regex group(R"(\(([^()]*)\))");
    static const std::regex year(R"(\s*(19|20)\d\d\s*(est\.?)?\s*)");
    double total = 0.0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), group); it != std::sregex_iterator(); ++it) {
      const auto inner = (*it)[1].str();
      if (std::regex_match(inner, year)) continue;
      const auto tokens = parser::scan_numbers(inner);
      if (!tokens.empty()) total += tokens.front().value;
    }
    return CellValue(total);
  }

  /// The "total" figure of an urban/rural/total breakdown, else the last number.
  static CellValue unimproved_value(const CellValue& cell, bool mnar) {
    if (is_absent(cell)) return mnar ? CellValue(0.0) : CellValue(Missing{});
    if (cell.is_number()) return cell;
    const auto s = std::string(text::truncate_at_note(lowered_text(cell)));
    const auto pos = s.find("total");
    const auto tokens = parser::scan_numbers(pos == std::string::npos ? std::string_view(s) : std::string_view(s).substr(pos));
    if (tokens.empty()) return mnar ? CellValue(0.0) : CellValue(Missing{});
    return CellValue(pos == std::string::npos ? tokens.back().value : tokens.front().value);
  }

  const Table& table_;
  const RuleSet& rules_;
  std::vector<parser::AuditEntry>& audit_;
};

}  // namespace

ConstructResult construct(const Table& v2, const RuleSet& rules) {
  ConstructResult result;
  TableBuilder builder(v2);
  RuleRunner runner(v2, rules, result.audit);

  for (const auto& rule : rules.rules) {
    const auto index = v2.find_column(rule.source_column);
    if (!index) {
      result.audit.push_back(parser::AuditEntry{"", rule.source_column, "SourceColumnAbsent", ""});
      continue;
    }
    std::vector<Output> outs;
    try {
      outs = runner.run(rule, v2.column(*index));
    } catch (const Error& e) {
      result.audit.push_back(parser::AuditEntry{"", rule.source_column, std::string("RuleFailed: ") + e.what(), ""});
      continue;
    }
    for (auto& out : outs) {
      const auto title = format_column_name(out.name);
      if (builder.find_column(title)) {
        result.audit.push_back(parser::AuditEntry{"", title, "DuplicateColumn", ""});
        continue;
      }
      result.generated.push_back(builder.add_column(std::move(out.name), std::move(out.cells)));
    }
  }

  result.table = std::move(builder).build(Version::v3);
  return result;
}

}  // namespace forge::constructor
