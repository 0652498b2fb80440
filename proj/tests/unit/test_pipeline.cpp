#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "forge/error.hpp"
#include "forge/pipeline.hpp"
#include "forge/snapshot.hpp"
#include "synthetic.hpp"

using namespace forge;
using namespace forge::pipeline;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FORGE_FIXTURES_DIR;
const fs::path kData = FORGE_DATA_DIR_FOR_TESTS;

PipelineConfig fixture_config(const std::string& name) {
  auto c = PipelineConfig::defaults();
  c.droplist = kData / "droplist.json";
  c.mnar_manifest = kData / "mnar_manifest.json";
  c.transform_rules = kData / "transform_rules.json";
  c.input_dir = kFixtures / "entities";
  c.output_dir = fs::temp_directory_path() / ("forge_pipeline_" + name);
  fs::remove_all(c.output_dir);
  c.threads = 1;
  c.runs = 3;
  c.forest.trees = 20;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no forge::Error thrown";
  return ErrorKind::IoError;
}

}  // namespace

TEST(Stages, ParseList) {
  EXPECT_EQ(parse_stages("parse, clean"), (std::vector<StageName>{StageName::parse, StageName::clean}));
  EXPECT_EQ(kind_of([] { parse_stages("parse,bogus"); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { parse_stages(""); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(output_version(StageName::impute), Version::v5);
}

TEST(Config, JsonOverlayAndValidation) {
  const auto base = fixture_config("cfg");
  const auto c = config_from_json(nlohmann::json{{"seed", 7}, {"correlation", "spearman"}, {"forest", {{"trees", 9}}}},
                                  base);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.correlation, stats::CorrelationMethod::spearman);
  EXPECT_EQ(c.forest.trees, 9u);
  EXPECT_EQ(c.runs, base.runs);
  EXPECT_EQ(kind_of([&] { config_from_json(nlohmann::json{{"sede", 1}}, base); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([&] { config_from_json(nlohmann::json{{"runs", "ten"}}, base); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([&] { config_from_json(nlohmann::json::array(), base); }), ErrorKind::ConfigInvalid);

  // Round trip through JSON.
  const auto again = config_from_json(to_json(c), base);
  EXPECT_EQ(to_json(again), to_json(c));

  auto bad = base;
  bad.sparse_threshold = 0.0;
  EXPECT_EQ(kind_of([&] { validate(bad); }), ErrorKind::ConfigInvalid);
  bad = base;
  bad.min_rows = 3;
  EXPECT_EQ(kind_of([&] { validate(bad); }), ErrorKind::ConfigInvalid);
  bad = base;
  bad.input_dir = base.output_dir / "nowhere";
  EXPECT_EQ(kind_of([&] { validate(bad); }), ErrorKind::ConfigInvalid);
  bad = base;
  bad.stages = {StageName::encode};
  EXPECT_EQ(kind_of([&] { validate(bad); }), ErrorKind::ConfigInvalid);
  EXPECT_NO_THROW(validate(base));
}

TEST(Run, FixtureEndToEndAndResume) {
  auto c = fixture_config("e2e");
  c.stages = {StageName::parse, StageName::clean};
  auto report = run(c);
  EXPECT_TRUE(fs::exists(c.output_dir / "v1.csv"));
  EXPECT_TRUE(fs::exists(c.output_dir / "v2.csv"));
  EXPECT_FALSE(fs::exists(c.output_dir / "v3.csv"));
  EXPECT_EQ(slurp(c.output_dir / "v1.csv"), slurp(kFixtures / "golden" / "v1.csv"));
  EXPECT_EQ(slurp(c.output_dir / "v2.csv"), slurp(kFixtures / "golden" / "v2.csv"));

  c.stages = {StageName::construct, StageName::encode, StageName::impute};
  report = run(c);
  for (const char* v : {"v3", "v4", "v5"}) {
    for (const char* ext : {".csv", ".schema.json"}) {
      const auto file = std::string(v) + ext;
      EXPECT_EQ(slurp(c.output_dir / file), slurp(kFixtures / "golden" / file)) << file;
    }
  }
  ASSERT_EQ(report.versions.size(), 5u);
  EXPECT_EQ(report.versions[0].rows, 6u);
  EXPECT_EQ(report.versions[1].rows, 4u);
  EXPECT_FALSE(report.cleaning.is_null());
  EXPECT_FALSE(report.imputation.is_null());
  // Timings from the first invocation survive the resumed one.
  EXPECT_TRUE(report.stage_seconds.contains("parse"));
  EXPECT_TRUE(report.stage_seconds.contains("impute"));

  const auto loaded = load_report(c.output_dir);
  EXPECT_EQ(to_json(loaded), to_json(report));
  const auto text = report_render(loaded);
  EXPECT_NE(text.find("v5"), std::string::npos);
}

TEST(Run, ImputeStageIsByteDeterministic) {
  const auto synth = synth::make_imputation_table(3, 80);
  std::string first;
  for (int i = 0; i < 2; ++i) {
    auto c = fixture_config("det" + std::to_string(i));
    c.stages = {StageName::impute};
    c.threads = i == 0 ? 1 : 3;
    fs::create_directories(c.output_dir);
    write_snapshot(synth.table, c.output_dir / "v4.csv");
    run(c);
    const auto bytes = slurp(c.output_dir / "v5.csv");
    EXPECT_FALSE(bytes.empty());
    if (i == 0) first = bytes;
    else EXPECT_EQ(bytes, first);
  }
  EXPECT_NE(first.find("(MAPE):"), std::string::npos);
}

TEST(Run, StageErrorsSurfaceAsStageFailure) {
  auto c = fixture_config("broken");
  c.stages = {StageName::encode};
  fs::create_directories(c.output_dir);
  {
    std::ofstream out(c.output_dir / "v3.csv");
    out << "not,a,snapshot\n";
  }
  EXPECT_EQ(kind_of([&] { run(c); }), ErrorKind::StageFailure);
  EXPECT_TRUE(fs::exists(c.output_dir / kReportFile));
}
