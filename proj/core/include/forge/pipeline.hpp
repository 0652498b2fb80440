#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/random_forest.hpp"
#include "forge/statistics.hpp"
#include "forge/table.hpp"

namespace forge::pipeline {

enum class StageName { parse, clean, construct, encode, impute };

inline constexpr StageName kAllStages[] = {StageName::parse, StageName::clean, StageName::construct,
                                           StageName::encode, StageName::impute};

std::string_view to_string(StageName stage) noexcept;
std::optional<StageName> stage_from_string(std::string_view name) noexcept;
/// "parse,clean" -> {parse, clean}; throws ConfigInvalid on unknown names.
std::vector<StageName> parse_stages(std::string_view list);

/// Snapshot version a stage writes.
Version output_version(StageName stage) noexcept;

/// Directory holding droplist.json, mnar_manifest.json and transform_rules.json.
/// FORGE_DATA_DIR overrides the built-in location.
std::filesystem::path default_data_dir();

struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::filesystem::path droplist;
  std::filesystem::path mnar_manifest;
  std::filesystem::path transform_rules;
  double sparse_threshold = 0.95;
  double ridge_threshold = 0.4;
  stats::CorrelationMethod correlation = stats::CorrelationMethod::pearson;
  std::size_t runs = 10;
  std::size_t cv_folds = 5;
  double acceptance_mape = 0.15;
  double test_fraction = 0.2;
  std::size_t min_rows = 10;
  model::ForestParams forest{};
  std::uint64_t seed = 2019;
  std::size_t threads = 0;
  std::vector<StageName> stages{std::begin(kAllStages), std::end(kAllStages)};

  /// Defaults with data files from default_data_dir().
  static PipelineConfig defaults();
};

/// Overlays the keys present in `doc` onto `base`; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = PipelineConfig::defaults());
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = PipelineConfig::defaults());
nlohmann::json to_json(const PipelineConfig& config);

/// Throws ConfigInvalid on out-of-range values or missing inputs.
void validate(const PipelineConfig& config);

struct VersionRow {
  Version version = Version::v1;
  std::size_t rows = 0;
  std::size_t columns = 0;
  MissingStats stats;
  std::map<std::string, std::size_t> dtype_counts;
};

VersionRow describe_version(const Table& table);

struct RunReport {
  nlohmann::json config;
  std::vector<VersionRow> versions;  // one row per snapshot on disk
  std::map<std::string, double> stage_seconds;
  std::vector<std::string> stages_run;
  std::vector<std::string> warnings;
  nlohmann::json cleaning;    // null when absent
  nlohmann::json imputation;  // null when absent
  std::map<std::string, std::string> artifacts;
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);
RunReport load_report(const std::filesystem::path& output_dir);

/// Version table plus per-stage imputation totals.
std::string report_render(const RunReport& report);

/// Runs the configured stages in order, resuming from snapshots on disk when
/// earlier stages are not requested. Stage errors surface as StageFailure.
RunReport run(const PipelineConfig& config);

inline constexpr std::string_view kReportFile = "run_report.json";

}  // namespace forge::pipeline
