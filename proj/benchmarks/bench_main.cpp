#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "forge/encoder.hpp"
#include "forge/linear_model.hpp"
#include "forge/parser.hpp"
#include "forge/random_forest.hpp"
#include "forge/statistics.hpp"

namespace {

using forge::model::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::vector<double>& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix x(rows, cols);
  y.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      x(r, c) = g(rng);
      y[r] += static_cast<double>(c + 1) * x(r, c);
    }
    y[r] += 0.1 * g(rng);
  }
  return x;
}

void BM_ScanNumbers(benchmark::State& state) {
  const std::string text =
      "total: 1,246,700 sq km land: 1,246,700 sq km water: 0 sq km; $193.6 billion (2017 est.) "
      "$190.3 billion (2016 est.) note: data are in 2017 dollars; 12.3 million (2018)";
  for (auto _ : state) benchmark::DoNotOptimize(forge::parser::scan_numbers(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ScanNumbers);

void BM_RidgeFit(benchmark::State& state) {
  std::vector<double> y;
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), y, 1);
  for (auto _ : state) benchmark::DoNotOptimize(forge::model::fit_ridge(x, y, 1.0));
}
BENCHMARK(BM_RidgeFit)->Args({230, 10})->Args({230, 100})->Args({230, 400});

void BM_OlsFit(benchmark::State& state) {
  std::vector<double> y;
  const auto x = random_matrix(230, static_cast<std::size_t>(state.range(0)), y, 2);
  for (auto _ : state) benchmark::DoNotOptimize(forge::model::fit_ols(x, y));
}
BENCHMARK(BM_OlsFit)->Arg(1)->Arg(20);

void BM_ForestFit(benchmark::State& state) {
  std::vector<double> y;
  const auto x = random_matrix(230, static_cast<std::size_t>(state.range(0)), y, 3);
  forge::model::ForestParams params;
  params.trees = 100;
  params.seed = 2019;
  for (auto _ : state) benchmark::DoNotOptimize(forge::model::RandomForest::fit(x, y, params));
}
BENCHMARK(BM_ForestFit)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Spearman(benchmark::State& state) {
  std::vector<double> y;
  const auto x = random_matrix(230, 1, y, 4);
  const auto col = x.column(0);
  for (auto _ : state) benchmark::DoNotOptimize(forge::stats::spearman(col, y));
}
BENCHMARK(BM_Spearman);

void BM_OneHot(benchmark::State& state) {
  const std::size_t rows = 230;
  std::vector<std::string> keys;
  std::vector<forge::CellValue> codes;
  for (std::size_t r = 0; r < rows; ++r) {
    keys.push_back("k" + std::to_string(1000 + r));
    codes.emplace_back(forge::Text{keys.back()});
  }
  forge::TableBuilder builder(keys);
  builder.add_column(forge::ColumnName::country_code(), codes);
  std::mt19937_64 rng(5);
  for (int c = 0; c < state.range(0); ++c) {
    std::vector<forge::CellValue> cells;
    for (std::size_t r = 0; r < rows; ++r) cells.push_back(forge::CellValue::label("l" + std::to_string(rng() % 8)));
    builder.add_column(forge::parse_column_name("lbl bench-col" + std::to_string(c)), std::move(cells));
  }
  const auto v3 = std::move(builder).build(forge::Version::v3);
  for (auto _ : state) benchmark::DoNotOptimize(forge::encoder::one_hot(v3));
}
BENCHMARK(BM_OneHot)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
