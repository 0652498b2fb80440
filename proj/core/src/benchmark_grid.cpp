#include "forge/benchmark_grid.hpp"

#include <cstdio>
#include <fstream>

#include "forge/error.hpp"
#include "parallel.hpp"

namespace forge::imputer {

const BenchmarkCell* BenchmarkGrid::best(std::string_view method) const {
  const BenchmarkCell* out = nullptr;
  for (const auto& cell : cells) {
    if (cell.method != method) continue;
    if (!out || cell.successes > out->successes) out = &cell;
  }
  return out;
}

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = 1; i <= 9; ++i) out.push_back(i / 10.0);
  return out;
}

BenchmarkGrid benchmark_thresholds(const Table& v4, const ImputerConfig& config,
                                   const std::vector<stats::CorrelationMethod>& methods,
                                   const std::vector<double>& thresholds, std::size_t runs) {
  BenchmarkGrid grid;
  grid.runs = runs;
  const auto view = NumericView::from(v4);
  const auto candidates = view.complete_columns();
  const auto targets = view.target_columns();
  grid.targets = targets.size();

  auto cfg = config;
  cfg.runs = runs;
  cfg.observer = nullptr;

  auto evaluate = [&](BenchmarkCell cell, const ImputerConfig& c) {
    std::vector<ColumnOutcome> outcomes(targets.size());
    detail::parallel_for(targets.size(), c.threads, [&](std::size_t i) {
      outcomes[i] = attempt_target(view, targets[i], candidates, Stage::ridge, c);
    });
    cell.cumulative.assign(runs, 0);
    for (const auto& o : outcomes) {
      for (std::size_t r = 0; r < o.run_mapes.size() && r < runs; ++r) {
        if (o.run_mapes[r] && *o.run_mapes[r] < c.acceptance_mape) ++cell.cumulative[r];
      }
    }
    for (std::size_t r = 1; r < runs; ++r) cell.cumulative[r] += cell.cumulative[r - 1];
    cell.successes = runs ? cell.cumulative.back() : 0;
    grid.cells.push_back(std::move(cell));
  };

  for (const auto method : methods) {
    for (const auto threshold : thresholds) {
      auto c = cfg;
      c.method = method;
      c.ridge_threshold = threshold;
      c.ridge_all_features = false;
      evaluate(BenchmarkCell{std::string(stats::to_string(method)), threshold, 0, {}}, c);
    }
  }
  auto baseline = cfg;
  baseline.ridge_all_features = true;
  evaluate(BenchmarkCell{"all_complete", 0.0, 0, {}}, baseline);
  return grid;
}

void write_benchmark_csv(const BenchmarkGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "method,threshold,successes";
  for (std::size_t r = 1; r <= grid.runs; ++r) out << ",run_" << r;
  out << "\n";
  for (const auto& cell : grid.cells) {
    char threshold[32];
    std::snprintf(threshold, sizeof threshold, "%.1f", cell.threshold);
    out << cell.method << ',' << threshold << ',' << cell.successes;
    for (const auto c : cell.cumulative) out << ',' << c;
    out << "\n";
  }
}

}  // namespace forge::imputer
