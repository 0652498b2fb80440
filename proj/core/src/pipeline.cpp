#include "forge/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>

#include "forge/cleaner.hpp"
#include "forge/constructor.hpp"
#include "forge/encoder.hpp"
#include "forge/error.hpp"
#include "forge/imputer.hpp"
#include "forge/parser.hpp"
#include "forge/snapshot.hpp"

namespace forge::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(StageName stage) noexcept {
  switch (stage) {
    case StageName::parse:
      return "parse";
    case StageName::clean:
      return "clean";
    case StageName::construct:
      return "construct";
    case StageName::encode:
      return "encode";
    case StageName::impute:
      return "impute";
  }
  return "parse";
}

std::optional<StageName> stage_from_string(std::string_view name) noexcept {
  for (const auto s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<StageName> parse_stages(std::string_view list) {
  std::set<StageName> chosen;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    auto token = list.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) {
      const auto stage = stage_from_string(token);
      if (!stage) throw Error(ErrorKind::ConfigInvalid, "unknown stage '" + std::string(token) + "'");
      chosen.insert(*stage);
    }
    start = end + 1;
  }
  if (chosen.empty()) throw Error(ErrorKind::ConfigInvalid, "no stages selected");
  return {chosen.begin(), chosen.end()};  // enum order is pipeline order
}

Version output_version(StageName stage) noexcept { return static_cast<Version>(static_cast<int>(stage) + 1); }

fs::path default_data_dir() {
  if (const char* env = std::getenv("FORGE_DATA_DIR"); env && *env) return env;
  const fs::path source = FORGE_DEFAULT_DATA_DIR;
  if (fs::exists(source / "transform_rules.json")) return source;
  return FORGE_INSTALL_DATA_DIR;
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  const auto dir = default_data_dir();
  c.droplist = dir / "droplist.json";
  c.mnar_manifest = dir / "mnar_manifest.json";
  c.transform_rules = dir / "transform_rules.json";
  return c;
}

PipelineConfig config_from_json(const json& doc, PipelineConfig c) {
  if (!doc.is_object()) throw Error(ErrorKind::ConfigInvalid, "config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "input") c.input_dir = value.get<std::string>();
      else if (key == "output") c.output_dir = value.get<std::string>();
      else if (key == "droplist") c.droplist = value.get<std::string>();
      else if (key == "mnar_manifest") c.mnar_manifest = value.get<std::string>();
      else if (key == "transform_rules") c.transform_rules = value.get<std::string>();
      else if (key == "sparse_threshold") c.sparse_threshold = value.get<double>();
      else if (key == "ridge_threshold") c.ridge_threshold = value.get<double>();
      else if (key == "correlation") {
        const auto m = stats::correlation_from_string(value.get<std::string>());
        if (!m) throw Error(ErrorKind::ConfigInvalid, "correlation must be pearson or spearman");
        c.correlation = *m;
      } else if (key == "runs") c.runs = value.get<std::size_t>();
      else if (key == "cv_folds") c.cv_folds = value.get<std::size_t>();
      else if (key == "acceptance_mape") c.acceptance_mape = value.get<double>();
      else if (key == "test_fraction") c.test_fraction = value.get<double>();
      else if (key == "min_rows") c.min_rows = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<std::size_t>();
      else if (key == "stages") {
        std::string list;
        for (const auto& s : value) list += s.get<std::string>() + ",";
        c.stages = parse_stages(list);
      } else if (key == "forest") {
        for (const auto& [fk, fv] : value.items()) {
          if (fk == "trees") c.forest.trees = fv.get<std::size_t>();
          else if (fk == "max_depth") c.forest.max_depth = fv.get<std::size_t>();
          else if (fk == "min_samples_leaf") c.forest.min_samples_leaf = fv.get<std::size_t>();
          else if (fk == "min_samples_split") c.forest.min_samples_split = fv.get<std::size_t>();
          else if (fk == "max_features") c.forest.max_features = fv.get<std::size_t>();
          else if (fk == "bootstrap") c.forest.bootstrap = fv.get<bool>();
          else throw Error(ErrorKind::ConfigInvalid, "unknown forest key '" + fk + "'");
        }
      } else {
        throw Error(ErrorKind::ConfigInvalid, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const fs::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
  return config_from_json(doc, std::move(base));
}

json to_json(const PipelineConfig& c) {
  json stages = json::array();
  for (const auto s : c.stages) stages.push_back(to_string(s));
  return {{"input", c.input_dir.string()},
          {"output", c.output_dir.string()},
          {"droplist", c.droplist.string()},
          {"mnar_manifest", c.mnar_manifest.string()},
          {"transform_rules", c.transform_rules.string()},
          {"sparse_threshold", c.sparse_threshold},
          {"ridge_threshold", c.ridge_threshold},
          {"correlation", stats::to_string(c.correlation)},
          {"runs", c.runs},
          {"cv_folds", c.cv_folds},
          {"acceptance_mape", c.acceptance_mape},
          {"test_fraction", c.test_fraction},
          {"min_rows", c.min_rows},
          {"seed", c.seed},
          {"threads", c.threads},
          {"stages", stages},
          {"forest",
           {{"trees", c.forest.trees},
            {"max_depth", c.forest.max_depth},
            {"min_samples_leaf", c.forest.min_samples_leaf},
            {"min_samples_split", c.forest.min_samples_split},
            {"max_features", c.forest.max_features},
            {"bootstrap", c.forest.bootstrap}}}};
}

void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); };
  if (c.output_dir.empty()) fail("output directory is required");
  if (c.stages.empty()) fail("no stages selected");
  if (!(c.sparse_threshold > 0.0 && c.sparse_threshold <= 1.0)) fail("sparse_threshold must lie in (0, 1]");
  if (!(c.ridge_threshold > 0.0 && c.ridge_threshold <= 1.0)) fail("ridge_threshold must lie in (0, 1]");
  if (!(c.acceptance_mape > 0.0)) fail("acceptance_mape must be positive");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) fail("test_fraction must lie in (0, 1)");
  if (c.runs == 0) fail("runs must be positive");
  if (c.cv_folds < 2) fail("cv_folds must be at least 2");
  if (c.min_rows < 2 * c.cv_folds) fail("min_rows must allow two rows per fold");
  if (c.forest.trees == 0) fail("forest needs at least one tree");

  const auto first = c.stages.front();
  if (first == StageName::parse) {
    if (c.input_dir.empty() || !fs::is_directory(c.input_dir)) fail("input directory not found: " + c.input_dir.string());
  } else {
    const auto previous = static_cast<Version>(static_cast<int>(output_version(first)) - 1);
    const auto needed = c.output_dir / (std::string(forge::to_string(previous)) + ".csv");
    if (!fs::exists(needed)) fail("stage '" + std::string(to_string(first)) + "' needs " + needed.string());
  }
  for (const auto s : c.stages) {
    const auto need = [&](const fs::path& p, const char* what) {
      if (!fs::exists(p)) fail(std::string(what) + " not found: " + p.string());
    };
    if (s == StageName::clean) {
      need(c.droplist, "droplist");
      need(c.mnar_manifest, "MNAR manifest");
    }
    if (s == StageName::construct) need(c.transform_rules, "transform rules");
  }
}

VersionRow describe_version(const Table& table) {
  VersionRow row;
  row.version = table.version();
  row.rows = table.row_count();
  row.columns = table.column_count();
  row.stats = missing_stats(table);
  for (const auto& column : table.columns()) {
    if (column.name.reserved == ReservedColumn::country_code) continue;
    ++row.dtype_counts[std::string(forge::to_string(column.name.dtype))];
  }
  return row;
}

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return nullptr;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return nullptr;
  }
}

void write_json_file(const json& doc, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

fs::path snapshot_path(const fs::path& dir, Version v) { return dir / (std::string(forge::to_string(v)) + ".csv"); }

class Runner {
 public:
  Runner(const PipelineConfig& config, RunReport& report) : config_(config), report_(report) {}

  void execute(StageName stage) {
    const auto started = std::chrono::steady_clock::now();
    try {
      switch (stage) {
        case StageName::parse:
          parse();
          break;
        case StageName::clean:
          clean();
          break;
        case StageName::construct:
          construct();
          break;
        case StageName::encode:
          encode();
          break;
        case StageName::impute:
          impute();
          break;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::StageFailure) throw;
      throw Error(ErrorKind::StageFailure, std::string(to_string(stage)) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::StageFailure, std::string(to_string(stage)) + ": " + e.what());
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    report_.stage_seconds[std::string(to_string(stage))] = elapsed.count();
    report_.stages_run.emplace_back(to_string(stage));
  }

 private:
  const Table& input(Version v) {
    if (!current_ || current_->version() != v) current_ = read_snapshot(snapshot_path(config_.output_dir, v), v);
    return *current_;
  }

  void publish(Table table, const std::string& artifact_key = {}, const fs::path& artifact = {}) {
    write_snapshot(table, snapshot_path(config_.output_dir, table.version()));
    if (!artifact_key.empty()) report_.artifacts[artifact_key] = artifact.filename().string();
    current_ = std::move(table);
  }

  void parse() {
    auto ingest = parser::ingest_directory(config_.input_dir);
    auto parsed = parser::build_table_v1(ingest.documents);
    const auto audit = config_.output_dir / "parse_audit.jsonl";
    parser::write_audit_jsonl(parsed.audit, audit);
    for (auto& w : ingest.warnings) report_.warnings.push_back("parse: " + w);
    for (auto& w : parsed.warnings) report_.warnings.push_back("parse: " + w);
    publish(std::move(parsed.table), "parse_audit", audit);
  }

  void clean() {
    cleaner::CleanerConfig cc;
    cc.droplist = cleaner::load_droplist(config_.droplist);
    cc.manifest = cleaner::load_mnar_manifest(config_.mnar_manifest);
    cc.families = cleaner::default_families();
    cc.sparse_threshold = config_.sparse_threshold;
    auto result = cleaner::clean(input(Version::v1), cc);
    const auto path = config_.output_dir / "cleaning_report.json";
    write_json_file(cleaner::to_json(result.report), path);
    for (auto& w : result.report.warnings) report_.warnings.push_back("clean: " + w);
    publish(std::move(result.table), "cleaning_report", path);
  }

  void construct() {
    const auto rules = constructor::load_rules(config_.transform_rules);
    auto result = constructor::construct(input(Version::v2), rules);
    const auto path = config_.output_dir / "construct_audit.jsonl";
    parser::write_audit_jsonl(result.audit, path);
    publish(std::move(result.table), "construct_audit", path);
  }

  void encode() {
    auto result = encoder::one_hot(input(Version::v3));
    const auto path = config_.output_dir / "encoding_plan.json";
    write_json_file(encoder::to_json(result.plan), path);
    publish(std::move(result.table), "encoding_plan", path);
  }

  void impute() {
    imputer::ImputerConfig ic;
    ic.ridge_threshold = config_.ridge_threshold;
    ic.method = config_.correlation;
    ic.runs = config_.runs;
    ic.folds = config_.cv_folds;
    ic.acceptance_mape = config_.acceptance_mape;
    ic.test_fraction = config_.test_fraction;
    ic.min_rows = config_.min_rows;
    ic.forest = config_.forest;
    ic.seed = config_.seed;
    ic.threads = config_.threads;
    auto result = imputer::impute(input(Version::v4), ic);
    const auto path = config_.output_dir / "imputation_report.json";
    write_json_file(imputer::to_json(result.report), path);
    publish(std::move(result.table), "imputation_report", path);
  }

  const PipelineConfig& config_;
  RunReport& report_;
  std::optional<Table> current_;
};

}  // namespace

json to_json(const RunReport& r) {
  json versions = json::array();
  for (const auto& v : r.versions) {
    versions.push_back({{"version", forge::to_string(v.version)},
                        {"rows", v.rows},
                        {"columns", v.columns},
                        {"total_cells", v.stats.total_cells},
                        {"empty_cells", v.stats.empty_cells},
                        {"filled_cells", v.stats.filled_cells},
                        {"dtypes", v.dtype_counts}});
  }
  return {{"config", r.config},         {"versions", versions},       {"stage_seconds", r.stage_seconds},
          {"stages_run", r.stages_run}, {"warnings", r.warnings},     {"cleaning", r.cleaning},
          {"imputation", r.imputation}, {"artifacts", r.artifacts}};
}

RunReport report_from_json(const json& doc) {
  RunReport r;
  try {
    r.config = doc.value("config", json(nullptr));
    for (const auto& v : doc.value("versions", json::array())) {
      VersionRow row;
      const auto version = version_from_string(v.at("version").get<std::string>());
      if (!version) throw Error(ErrorKind::SchemaMismatch, "bad version in run report");
      row.version = *version;
      row.rows = v.at("rows").get<std::size_t>();
      row.columns = v.at("columns").get<std::size_t>();
      row.stats.total_cells = v.at("total_cells").get<std::size_t>();
      row.stats.empty_cells = v.at("empty_cells").get<std::size_t>();
      row.stats.filled_cells = v.at("filled_cells").get<std::size_t>();
      row.dtype_counts = v.value("dtypes", std::map<std::string, std::size_t>{});
      r.versions.push_back(row);
    }
    r.stage_seconds = doc.value("stage_seconds", std::map<std::string, double>{});
    r.stages_run = doc.value("stages_run", std::vector<std::string>{});
    r.warnings = doc.value("warnings", std::vector<std::string>{});
    r.cleaning = doc.value("cleaning", json(nullptr));
    r.imputation = doc.value("imputation", json(nullptr));
    r.artifacts = doc.value("artifacts", std::map<std::string, std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("run report: ") + e.what());
  }
  return r;
}

RunReport load_report(const fs::path& output_dir) {
  const auto doc = read_json_file(output_dir / kReportFile);
  if (doc.is_null()) throw Error(ErrorKind::IoError, "no readable " + std::string(kReportFile) + " in " + output_dir.string());
  return report_from_json(doc);
}

RunReport run(const PipelineConfig& config) {
  validate(config);
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw Error(ErrorKind::ConfigInvalid, "cannot create " + config.output_dir.string() + ": " + ec.message());

  RunReport report;
  if (const auto previous = read_json_file(config.output_dir / kReportFile); !previous.is_null()) {
    try {
      const auto old = report_from_json(previous);
      report.stage_seconds = old.stage_seconds;
      report.artifacts = old.artifacts;
    } catch (const Error&) {
      // A stale or foreign report is simply replaced.
    }
  }
  report.config = to_json(config);

  auto finish = [&] {
    report.versions.clear();
    for (int v = 1; v <= 5; ++v) {
      const auto path = snapshot_path(config.output_dir, static_cast<Version>(v));
      if (!fs::exists(path)) continue;
      try {
        report.versions.push_back(describe_version(read_snapshot(path, static_cast<Version>(v))));
      } catch (const Error& e) {
        report.warnings.push_back("report: skipped unreadable " + path.filename().string() + ": " + e.what());
      }
    }
    report.cleaning = read_json_file(config.output_dir / "cleaning_report.json");
    report.imputation = read_json_file(config.output_dir / "imputation_report.json");
    write_json_file(to_json(report), config.output_dir / kReportFile);
  };

  Runner runner(config, report);
  try {
    for (const auto stage : config.stages) runner.execute(stage);
  } catch (const Error&) {
    report.warnings.emplace_back("run aborted; snapshots written so far are kept");
    finish();
    throw;
  }
  finish();
  return report;
}

}  // namespace forge::pipeline
