#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "forge/imputer.hpp"

namespace forge::imputer {

struct BenchmarkCell {
  std::string method;  // "pearson", "spearman" or "all_complete"
  double threshold = 0.0;  // 0 for the baseline
  std::size_t successes = 0;  // accepted runs summed over targets and runs
  std::vector<std::size_t> cumulative;  // successes after each run
};

struct BenchmarkGrid {
  std::size_t runs = 0;
  std::size_t targets = 0;
  std::vector<BenchmarkCell> cells;

  /// Threshold with the most successes for `method`; ties keep the lower threshold.
  const BenchmarkCell* best(std::string_view method) const;
};

std::vector<double> default_thresholds();  // 0.1 .. 0.9

/// Ridge success counts per (method, threshold) plus the all-complete-columns
/// baseline, on an unimputed v4 table.
BenchmarkGrid benchmark_thresholds(const Table& v4, const ImputerConfig& config,
                                   const std::vector<stats::CorrelationMethod>& methods = {stats::CorrelationMethod::pearson,
                                                                                            stats::CorrelationMethod::spearman},
                                   const std::vector<double>& thresholds = default_thresholds(), std::size_t runs = 10);

void write_benchmark_csv(const BenchmarkGrid& grid, const std::filesystem::path& path);

}  // namespace forge::imputer
