#include <cstdio>
#include <string>

#include "forge/pipeline.hpp"

namespace forge::pipeline {
namespace {

template <typename... Args>
std::string line(const char* format, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

}  // namespace

std::string report_render(const RunReport& report) {
  std::string out;
  out += line("%-8s %6s %8s %10s %10s %8s\n", "version", "rows", "columns", "empty", "filled", "empty%");
  for (const auto& v : report.versions) {
    out += line("%-8s %6zu %8zu %10zu %10zu %7.1f%%\n", std::string(forge::to_string(v.version)).c_str(), v.rows,
                v.columns, v.stats.empty_cells, v.stats.filled_cells, 100.0 * v.stats.empty_fraction());
  }

  const auto& imp = report.imputation;
  if (!imp.is_object() || !imp.contains("totals")) return out;

  out += "\n";
  out += line("%-14s %10s %9s %8s %12s %12s\n", "stage", "attempted", "accepted", "cells", "vs v4", "vs entry");
  std::size_t stage_sum = 0;
  for (const auto& t : imp["totals"]) {
    const auto cells = t.value("cells_filled", std::size_t{0});
    stage_sum += cells;
    out += line("%-14s %10zu %9zu %8zu %11.1f%% %11.1f%%\n", t.value("stage", std::string()).c_str(),
                t.value("columns_attempted", std::size_t{0}), t.value("columns_accepted", std::size_t{0}), cells,
                100.0 * t.value("reduction_vs_v4", 0.0), 100.0 * t.value("reduction_vs_entry", 0.0));
  }
  std::size_t column_sum = 0;
  for (const auto& c : imp.value("columns", nlohmann::json::array())) column_sum += c.value("cells_filled", std::size_t{0});
  out += line("total cells filled: %zu%s\n", column_sum, column_sum == stage_sum ? "" : " (stage totals disagree)");
  return out;
}

}  // namespace forge::pipeline
