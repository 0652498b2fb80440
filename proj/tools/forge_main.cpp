// forge: build the Factbook dataset versions v1-v5 from raw entity JSON.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "forge/benchmark_grid.hpp"
#include "forge/error.hpp"
#include "forge/parser.hpp"
#include "forge/pipeline.hpp"
#include "forge/snapshot.hpp"

namespace fs = std::filesystem;
using forge::pipeline::PipelineConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct RunOptions {
  std::string input;
  std::string out;
  std::string config;
  std::string stages;
  std::optional<std::uint64_t> seed;
  std::optional<double> ridge_threshold;
  std::string corr;
  std::optional<std::size_t> threads;
};

PipelineConfig build_config(const RunOptions& o) {
  auto config = PipelineConfig::defaults();
  if (!o.config.empty()) config = forge::pipeline::load_config(o.config, config);
  if (!o.input.empty()) config.input_dir = o.input;
  if (!o.out.empty()) config.output_dir = o.out;
  if (!o.stages.empty()) config.stages = forge::pipeline::parse_stages(o.stages);
  if (o.seed) config.seed = *o.seed;
  if (o.ridge_threshold) config.ridge_threshold = *o.ridge_threshold;
  if (o.threads) config.threads = *o.threads;
  if (!o.corr.empty()) {
    const auto method = forge::stats::correlation_from_string(o.corr);
    if (!method) throw forge::Error(forge::ErrorKind::ConfigInvalid, "--corr must be pearson or spearman");
    config.correlation = *method;
  }
  return config;
}

int exit_code_for(const forge::Error& e) {
  return e.kind() == forge::ErrorKind::ConfigInvalid ? kExitConfig : kExitStage;
}

int cmd_run(const RunOptions& o) {
  const auto config = build_config(o);
  const auto report = forge::pipeline::run(config);
  std::cout << forge::pipeline::report_render(report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_report(const std::string& out) {
  std::cout << forge::pipeline::report_render(forge::pipeline::load_report(out));
  return kExitOk;
}

int cmd_benchmark(const RunOptions& o) {
  auto config = build_config(o);
  if (config.output_dir.empty()) throw forge::Error(forge::ErrorKind::ConfigInvalid, "--out is required");
  fs::create_directories(config.output_dir);

  // Reuse an existing v4 snapshot; otherwise build it from the raw input.
  const auto v4 = config.output_dir / "v4.csv";
  if (!fs::exists(v4)) {
    config.stages = forge::pipeline::parse_stages("parse,clean,construct,encode");
    forge::pipeline::run(config);
  }
  const auto table = forge::read_snapshot(v4, forge::Version::v4);

  forge::imputer::ImputerConfig ic;
  ic.acceptance_mape = config.acceptance_mape;
  ic.folds = config.cv_folds;
  ic.test_fraction = config.test_fraction;
  ic.min_rows = config.min_rows;
  ic.ridge_alphas = forge::imputer::ImputerConfig{}.ridge_alphas;
  ic.seed = config.seed;
  ic.threads = config.threads;
  const auto grid = forge::imputer::benchmark_thresholds(
      table, ic, {forge::stats::CorrelationMethod::pearson, forge::stats::CorrelationMethod::spearman},
      forge::imputer::default_thresholds(), config.runs);
  const auto path = config.output_dir / "benchmark_grid.csv";
  forge::imputer::write_benchmark_csv(grid, path);

  std::printf("%-13s %9s %9s\n", "method", "threshold", "successes");
  for (const auto& cell : grid.cells) std::printf("%-13s %9.1f %9zu\n", cell.method.c_str(), cell.threshold, cell.successes);
  std::printf("written: %s\n", path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build versioned CIA World Factbook datasets (v1-v5)"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run pipeline stages");
  run->add_option("--input", run_opts.input, "Directory of raw entity JSON files");
  run->add_option("--out", run_opts.out, "Output directory for snapshots and reports");
  run->add_option("--config", run_opts.config, "JSON config file");
  run->add_option("--stages", run_opts.stages, "Comma list: parse,clean,construct,encode,impute");
  run->add_option("--seed", run_opts.seed, "RNG seed");
  run->add_option("--ridge-threshold", run_opts.ridge_threshold, "Ridge feature-selection threshold");
  run->add_option("--corr", run_opts.corr, "Correlation method: pearson or spearman");
  run->add_option("--threads", run_opts.threads, "Worker threads for model fitting (0: all cores)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Print the run report of an output directory");
  report->add_option("out", report_dir, "Output directory")->required();

  RunOptions bench_opts;
  auto* bench = app.add_subcommand("benchmark", "Ridge threshold/correlation benchmark grid");
  bench->add_option("--input", bench_opts.input, "Directory of raw entity JSON files");
  bench->add_option("--out", bench_opts.out, "Output directory")->required();
  bench->add_option("--config", bench_opts.config, "JSON config file");
  bench->add_option("--seed", bench_opts.seed, "RNG seed");
  bench->add_option("--threads", bench_opts.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*report) return cmd_report(report_dir);
    if (*bench) return cmd_benchmark(bench_opts);
  } catch (const forge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
