#include "forge/cleaner.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"

namespace forge::cleaner {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
}

std::string render(const CellValue& cell) {
  if (cell.is_number()) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, cell.as_number());
    return std::string(buf, ec == std::errc{} ? ptr : buf);
  }
  if (cell.is_binary()) return cell.as_binary() ? "1" : "0";
  if (cell.is_text() || cell.is_label()) return cell.string_payload();
  return {};
}

std::size_t filled(const Table& t) { return missing_stats(t).filled_cells; }

}  // namespace

Droplist load_droplist(const fs::path& path) {
  const auto doc = read_json(path);
  Droplist out;
  const json& codes = doc.is_array() ? doc : doc.value("codes", json::array());
  for (const auto& c : codes) {
    if (c.is_string()) out.codes.push_back(c.get<std::string>());
    else if (c.is_object() && c.contains("code")) out.codes.push_back(c["code"].get<std::string>());
  }
  if (doc.is_object() && doc.contains("population_body")) {
    out.population_body = doc["population_body"].get<std::string>();
  }
  return out;
}

const MnarEntry* MnarManifest::match(std::string_view title) const {
  for (const auto& e : entries) {
    if (e.pattern == title) return &e;
  }
  for (const auto& e : entries) {
    if (title.size() > e.pattern.size() && title.starts_with(e.pattern) && title[e.pattern.size()] == ' ') return &e;
  }
  return nullptr;
}

MnarManifest load_mnar_manifest(const fs::path& path) {
  const auto doc = read_json(path);
  const json& columns = doc.is_array() ? doc : doc.value("columns", json::array());
  MnarManifest out;
  std::set<std::string> seen;
  for (const auto& entry : columns) {
    MnarEntry e;
    if (entry.is_string()) {
      e.pattern = entry.get<std::string>();
    } else if (entry.is_object()) {
      e.pattern = entry.value("pattern", std::string{});
      if (entry.contains("fill")) {
        const auto& f = entry["fill"];
        if (f.is_number()) e.fill = CellValue(f.get<double>());
        else if (f.is_string()) e.fill = CellValue::text(f.get<std::string>());
      }
    }
    if (e.pattern.empty()) throw Error(ErrorKind::ConfigInvalid, "empty MNAR pattern in " + path.string());
    if (seen.insert(e.pattern).second) out.entries.push_back(std::move(e));
  }
  return out;
}

CellValue mnar_fill_for(const ColumnName& name, const std::optional<CellValue>& explicit_fill) {
  const auto title = format_column_name(name);
  if (name.dtype == Dtype::enc) throw Error(ErrorKind::TypeMismatch, "MNAR fill on binary column '" + title + "'");
  if (!explicit_fill) {
    if (is_numeric_dtype(name.dtype)) return CellValue(0.0);
    if (name.dtype == Dtype::lbl) return CellValue::label(std::string(kNoneLabel));
    return CellValue::text(std::string(kNoneText));
  }
  const auto& fill = *explicit_fill;
  if (is_numeric_dtype(name.dtype)) {
    if (!fill.is_number()) throw Error(ErrorKind::TypeMismatch, "fill " + describe(fill) + " for '" + title + "'");
    return fill;
  }
  if (!fill.is_text() && !fill.is_label()) {
    throw Error(ErrorKind::TypeMismatch, "fill " + describe(fill) + " for '" + title + "'");
  }
  return name.dtype == Dtype::lbl ? CellValue::label(fill.string_payload()) : CellValue::text(fill.string_payload());
}

std::vector<ConcatFamily> default_families() {
  auto txt = [](std::string body) {
    ColumnName name;
    name.dtype = Dtype::txt;
    name.body = std::move(body);
    return name;
  };
  return {
      {"terrorism-terrorist-groups-home-based", txt("terrorism-terrorist-groups-home-based"),
       ConcatFamily::Mode::presence},
      {"terrorism-terrorist-groups-foreign-based", txt("terrorism-terrorist-groups-foreign-based"),
       ConcatFamily::Mode::presence},
      {"geography-land-boundaries-border-countries", txt("geography-land-boundaries-border-countries-overall"),
       ConcatFamily::Mode::valued},
  };
}

RowDropResult drop_nonstate_rows(const Table& table, const Droplist& droplist) {
  RowDropResult result;
  std::set<std::string> drop(droplist.codes.begin(), droplist.codes.end());
  for (const auto& code : droplist.codes) {
    if (!table.find_row(code)) result.warnings.push_back("DroplistCodeUnknown: '" + code + "' not in table");
  }

  const Column* population = nullptr;
  for (const auto& column : table.columns()) {
    if (column.name.body == droplist.population_body && is_numeric_dtype(column.name.dtype) && !column.name.subfield) {
      population = &column;
      break;
    }
  }
  if (!population) {
    for (const auto& column : table.columns()) {
      if (column.name.body == droplist.population_body && is_numeric_dtype(column.name.dtype)) {
        population = &column;
        break;
      }
    }
  }
  if (!population) result.warnings.push_back("population column '" + droplist.population_body + "' not found");

  std::vector<bool> keep(table.row_count(), true);
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto& code = table.row_keys()[r];
    std::string reason;
    if (drop.contains(code)) {
      reason = "non-state entity";
    } else if (population && !population->cells[r].is_number()) {
      reason = "no official population figure";
    }
    if (reason.empty()) continue;
    keep[r] = false;
    result.dropped.push_back(RowDrop{code, reason});
    for (const auto& column : table.columns()) {
      if (!column.cells[r].is_missing()) ++result.filled_cells_lost;
    }
  }

  TableBuilder builder(table);
  builder.retain_rows(keep);
  result.table = std::move(builder).build(table.version());
  return result;
}

ConcatResult concat_group_columns(const Table& table, const ConcatFamily& family) {
  ConcatResult result;
  const auto target_title = format_column_name(family.target);
  std::vector<const Column*> members;
  std::optional<std::size_t> first_position;
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    const auto& column = table.column(c);
    if (column.name.is_reserved()) continue;
    if (column.name.body == family.body || column.title == target_title) {
      members.push_back(&column);
      if (!first_position) first_position = c;
    }
  }
  if (members.empty()) {
    result.warnings.push_back("EmptyFamily: no columns for '" + family.body + "'");
    result.table = table;
    return result;
  }
  result.source_count = members.size();

  std::vector<CellValue> cells;
  cells.reserve(table.row_count());
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    std::vector<std::string> parts;
    for (const auto* column : members) {
      const auto& cell = column->cells[r];
      if (cell.is_missing()) continue;
      if (!column->name.subfield) {
        parts.push_back(render(cell));
      } else if (family.mode == ConcatFamily::Mode::presence) {
        parts.push_back(*column->name.subfield);
      } else {
        parts.push_back(*column->name.subfield + ": " + render(cell));
      }
    }
    if (parts.empty()) {
      cells.emplace_back(Missing{});
      continue;
    }
    std::sort(parts.begin(), parts.end());
    std::string joined;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) joined += kConcatDelimiter;
      joined += parts[i];
    }
    cells.push_back(CellValue::text(std::move(joined)));
  }

  TableBuilder builder(table);
  std::vector<std::string> titles;
  for (const auto* column : members) titles.push_back(column->title);
  for (const auto& title : titles) builder.remove_column(title);
  builder.insert_column(*first_position, family.target, std::move(cells));
  result.table = std::move(builder).build(table.version());
  return result;
}

MnarResult fill_mnar(const Table& table, const MnarManifest& manifest) {
  MnarResult result;
  std::set<std::string> used;
  TableBuilder builder(table);
  for (const auto& column : table.columns()) {
    if (column.name.is_reserved()) continue;
    const auto* entry = manifest.match(column.title);
    if (!entry) continue;
    used.insert(entry->pattern);
    const auto fill = mnar_fill_for(column.name, entry->fill);
    auto cells = column.cells;
    std::size_t count = 0;
    for (auto& cell : cells) {
      if (cell.is_missing()) {
        cell = fill;
        ++count;
      }
    }
    if (count) builder.set_cells(column.title, std::move(cells));
    result.cells_filled += count;
  }
  for (const auto& entry : manifest.entries) {
    if (!used.contains(entry.pattern)) result.stale_patterns.push_back(entry.pattern);
  }
  result.table = std::move(builder).build(table.version());
  return result;
}

SparseResult drop_sparse_columns(const Table& table, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "sparse threshold must lie in (0, 1]");
  }
  SparseResult result;
  TableBuilder builder(table);
  const auto rows = static_cast<double>(table.row_count());
  for (const auto& column : table.columns()) {
    if (column.name.is_reserved() || table.row_count() == 0) continue;
    const auto missing = column.missing_count();
    if (static_cast<double>(missing) / rows > threshold) {
      result.dropped.push_back(column.title);
      result.filled_cells_lost += table.row_count() - missing;
      builder.remove_column(column.title);
    }
  }
  result.table = std::move(builder).build(table.version());
  return result;
}

bool CleaningReport::accounting_holds() const noexcept {
  const auto expected = static_cast<std::int64_t>(stats_before.filled_cells) -
                        static_cast<std::int64_t>(cells_lost_to_row_drops) -
                        static_cast<std::int64_t>(cells_lost_to_column_drops) +
                        static_cast<std::int64_t>(mnar_cells_filled) + concatenation_delta;
  return expected == static_cast<std::int64_t>(stats_after.filled_cells) &&
         stats_after.total_cells == stats_after.empty_cells + stats_after.filled_cells;
}

double CleaningReport::empty_cell_reduction() const noexcept {
  if (stats_before.empty_cells == 0) return 0.0;
  return 1.0 - static_cast<double>(stats_after.empty_cells) / static_cast<double>(stats_before.empty_cells);
}

double CleaningReport::data_cell_loss() const noexcept {
  if (stats_before.filled_cells == 0) return 0.0;
  return 1.0 - static_cast<double>(stats_after.filled_cells) / static_cast<double>(stats_before.filled_cells);
}

double CleaningReport::concat_empty_reduction() const noexcept {
  const auto before = stats_after_step.find("rows");
  const auto after = stats_after_step.find("concat");
  if (before == stats_after_step.end() || after == stats_after_step.end() || stats_before.empty_cells == 0) {
    return 0.0;
  }
  return (static_cast<double>(before->second.empty_cells) - static_cast<double>(after->second.empty_cells)) /
         static_cast<double>(stats_before.empty_cells);
}

namespace {

json stats_json(const MissingStats& s) {
  return {{"total_cells", s.total_cells}, {"empty_cells", s.empty_cells}, {"filled_cells", s.filled_cells}};
}

}  // namespace

json to_json(const CleaningReport& report) {
  json rows = json::array();
  for (const auto& d : report.rows_dropped) rows.push_back({{"code", d.code}, {"reason", d.reason}});
  json steps = json::object();
  for (const auto& [step, stats] : report.stats_after_step) steps[step] = stats_json(stats);
  return {
      {"rows_dropped", rows},
      {"columns_concatenated", report.columns_concatenated},
      {"mnar_cells_filled", report.mnar_cells_filled},
      {"mnar_stale_patterns", report.mnar_stale_patterns},
      {"columns_dropped", report.columns_dropped},
      {"warnings", report.warnings},
      {"stats_before", stats_json(report.stats_before)},
      {"stats_after", stats_json(report.stats_after)},
      {"stats_after_step", steps},
      {"cells_lost_to_row_drops", report.cells_lost_to_row_drops},
      {"cells_lost_to_column_drops", report.cells_lost_to_column_drops},
      {"concatenation_delta", report.concatenation_delta},
      {"accounting_holds", report.accounting_holds()},
      {"empty_cell_reduction", report.empty_cell_reduction()},
      {"data_cell_loss", report.data_cell_loss()},
      {"concat_empty_reduction", report.concat_empty_reduction()},
  };
}

CleanResult clean(const Table& v1, const CleanerConfig& config, std::span<const CleaningStep> order) {
  CleanResult out;
  auto& report = out.report;
  report.stats_before = missing_stats(v1);
  Table current = v1;

  for (const auto step : order) {
    switch (step) {
      case CleaningStep::rows: {
        auto r = drop_nonstate_rows(current, config.droplist);
        report.rows_dropped = std::move(r.dropped);
        report.cells_lost_to_row_drops += r.filled_cells_lost;
        report.warnings.insert(report.warnings.end(), r.warnings.begin(), r.warnings.end());
        current = std::move(r.table);
        report.stats_after_step["rows"] = missing_stats(current);
        break;
      }
      case CleaningStep::concat: {
        for (const auto& family : config.families) {
          const auto before = static_cast<std::int64_t>(filled(current));
          auto r = concat_group_columns(current, family);
          report.warnings.insert(report.warnings.end(), r.warnings.begin(), r.warnings.end());
          if (r.source_count) report.columns_concatenated[format_column_name(family.target)] = r.source_count;
          current = std::move(r.table);
          report.concatenation_delta += static_cast<std::int64_t>(filled(current)) - before;
        }
        report.stats_after_step["concat"] = missing_stats(current);
        break;
      }
      case CleaningStep::mnar: {
        auto r = fill_mnar(current, config.manifest);
        report.mnar_cells_filled += r.cells_filled;
        report.mnar_stale_patterns = std::move(r.stale_patterns);
        current = std::move(r.table);
        report.stats_after_step["mnar"] = missing_stats(current);
        break;
      }
      case CleaningStep::sparse: {
        auto r = drop_sparse_columns(current, config.sparse_threshold);
        report.columns_dropped = std::move(r.dropped);
        report.cells_lost_to_column_drops += r.filled_cells_lost;
        current = std::move(r.table);
        report.stats_after_step["sparse"] = missing_stats(current);
        break;
      }
    }
  }

  report.stats_after = missing_stats(current);
  TableBuilder builder(current);
  out.table = std::move(builder).build(Version::v2);
  return out;
}

}  // namespace forge::cleaner
