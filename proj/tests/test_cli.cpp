// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fairgauge/cli.hpp"
#include "fairgauge/config_io.hpp"
#include "test_support.hpp"

using namespace fairgauge;
namespace ft = fairgauge::testing;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string src(const std::string& rel) { return ft::source_path(rel); }

class SeedOverride {
 public:
  explicit SeedOverride(const char* value) { ::setenv("FAIRGAUGE_SEED_OVERRIDE", value, 1); }
  ~SeedOverride() { ::unsetenv("FAIRGAUGE_SEED_OVERRIDE"); }
};

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

const char* kSmallScenario = R"({"version":1,"seed":11,"groups":[
 {"id":"P","mated_mean":0.5,"mated_sd":0.1,"nonmated_mean":0.05,"nonmated_sd":0.1,"n_mated":3000,"n_nonmated":500},
 {"id":"Q","mated_mean":0.5,"mated_sd":0.1,"nonmated_mean":0.05,"nonmated_sd":0.1,"n_mated":3000,"n_nonmated":500}]})";

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  auto v = cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("1.0.0"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"metrics", "--out", "x"}).code, 2);
}

TEST(Cli, MetricsOnPublishedBlock) {
  ft::TempDir dir("cli_metrics");
  auto r = cli({"metrics", "--rates", ft::fixture("arcface_original_diveface"), "--out", dir / "m"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(ft::slurp(dir / "m/metrics.json"));
  EXPECT_EQ(doc["command"], "metrics");
  EXPECT_NEAR(doc["metrics"][0]["fdr"].get<double>(), 0.91, 0.01);
  EXPECT_NEAR(doc["metrics"][0]["garbe"].get<double>(), 0.35, 0.01);
  EXPECT_TRUE(std::filesystem::exists(dir / "m/metrics.md"));
}

TEST(Cli, MetricsAlphaOutOfRangeExitsTwo) {
  ft::TempDir dir("cli_alpha");
  EXPECT_EQ(cli({"metrics", "--rates", ft::fixture("arcface_original_rfw"), "--alpha", "1", "--out", dir / "m"}).code,
            2);
}

TEST(Cli, SingleGroupIsMetricUndefined) {
  ft::TempDir dir("cli_single");
  ft::spit(dir / "one.json", R"({"groups":["A"],"threshold_labels":["t1"],"fmr":[[0.1]],"fnmr":[[0.2]]})");
  auto r = cli({"metrics", "--rates", dir / "one.json", "--out", dir / "m"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("two groups"), std::string::npos);
}

TEST(Cli, MissingInputIsIoError) {
  ft::TempDir dir("cli_missing");
  EXPECT_EQ(cli({"metrics", "--rates", dir / "absent.json", "--out", dir / "m"}).code, 4);
  EXPECT_EQ(cli({"audit", "--scores", dir / "absent.csv", "--out", dir / "a"}).code, 4);
}

TEST(Cli, MalformedCsvIsInputErrorWithLine) {
  ft::TempDir dir("cli_badcsv");
  ft::spit(dir / "s.csv", "score,mated,group\n0.5,1,A\n0.5,2,A\n");
  auto r = cli({"audit", "--scores", dir / "s.csv", "--out", dir / "a"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "a/audit.json"));
}

TEST(Cli, GroupWithoutNonmatedIsInputError) {
  ft::TempDir dir("cli_nonmated");
  ft::spit(dir / "s.csv", "score,mated,group\n0.9,1,Y\n0.1,0,Y\n0.8,1,X\n");
  auto r = cli({"audit", "--scores", dir / "s.csv", "--out", dir / "a"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("X"), std::string::npos);
}

TEST(Cli, SimulateWritesDeterministicCsv) {
  ft::TempDir dir("cli_sim");
  ft::spit(dir / "sc.json", R"({"version":1,"seed":4,"groups":[
    {"id":"A","mated_mean":0.5,"mated_sd":0.1,"nonmated_mean":0,"nonmated_sd":0.1,"n_mated":1000,"n_nonmated":5000},
    {"id":"B","mated_mean":0.5,"mated_sd":0.1,"nonmated_mean":0,"nonmated_sd":0.1,"n_mated":1000,"n_nonmated":5000}]})");
  ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "a.csv"}).code, 0);
  ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "b.csv"}).code, 0);
  const auto a = ft::slurp(dir / "a.csv");
  EXPECT_EQ(count_lines(a), 12001u);
  EXPECT_EQ(a, ft::slurp(dir / "b.csv"));
  EXPECT_EQ(parse_comparisons(a).size(), 12000u);
}

TEST(Cli, SimulateRejectsNonPositiveSd) {
  ft::TempDir dir("cli_sd");
  ft::spit(dir / "sc.json", R"({"version":1,"seed":4,"groups":[
    {"id":"A","mated_mean":0.5,"mated_sd":0.1,"nonmated_mean":0,"nonmated_sd":0.1,"n_mated":10,"n_nonmated":10},
    {"id":"B","mated_mean":0.5,"mated_sd":0.1,"nonmated_mean":0,"nonmated_sd":-0.1,"n_mated":10,"n_nonmated":10}]})");
  auto r = cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "a.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("groups[1].nonmated_sd"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "a.csv"));
}

TEST(Cli, SeedOverrideChangesTheDraws) {
  ft::TempDir dir("cli_seed");
  ft::spit(dir / "sc.json", kSmallScenario);
  ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "plain.csv"}).code, 0);
  {
    SeedOverride env("11");
    ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "same.csv"}).code, 0);
  }
  {
    SeedOverride env("12");
    ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "other.csv"}).code, 0);
  }
  {
    SeedOverride env("twelve");
    EXPECT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "bad.csv"}).code, 2);
  }
  EXPECT_EQ(ft::slurp(dir / "plain.csv"), ft::slurp(dir / "same.csv"));
  EXPECT_NE(ft::slurp(dir / "plain.csv"), ft::slurp(dir / "other.csv"));
}

TEST(Cli, AuditOfSimulatedScores) {
  ft::TempDir dir("cli_audit");
  ft::spit(dir / "sc.json", kSmallScenario);
  ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "s.csv"}).code, 0);
  auto r = cli({"audit", "--scores", dir / "s.csv", "--config", src("configs/run_default.json"), "--out", dir / "a"});
  ASSERT_EQ(r.code, 0) << r.err;
  // 500 non-mated per group cannot resolve FMR = 0.1%
  EXPECT_NE(r.err.find("warning:"), std::string::npos);
  auto doc = json::parse(ft::slurp(dir / "a/audit.json"));
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["input_digest"], sha256_digest(ft::slurp(dir / "s.csv")));
  EXPECT_EQ(doc["thresholds"].size(), 3u);
  EXPECT_EQ(doc["rates"]["groups"], json({"P", "Q"}));
  EXPECT_FALSE(doc["warnings"].empty());
}

TEST(Cli, AuditRerunFromEchoedConfigIsIdentical) {
  ft::TempDir dir("cli_rerun");
  ft::spit(dir / "sc.json", kSmallScenario);
  ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "s.csv"}).code, 0);
  ft::spit(dir / "cfg.json", R"({"version":1,"alpha":0.3,"fmr_targets":[0.05,0.005],"bias_policy":{"kappa":1.5}})");
  ASSERT_EQ(cli({"audit", "--scores", dir / "s.csv", "--config", dir / "cfg.json", "--out", dir / "a"}).code, 0);
  auto doc = json::parse(ft::slurp(dir / "a/audit.json"));
  ft::spit(dir / "echo.json", doc["config"].dump());
  ASSERT_EQ(cli({"audit", "--scores", dir / "s.csv", "--config", dir / "echo.json", "--out", dir / "b"}).code, 0);
  EXPECT_EQ(ft::slurp(dir / "a/audit.json"), ft::slurp(dir / "b/audit.json"));
  EXPECT_EQ(ft::slurp(dir / "a/audit.md"), ft::slurp(dir / "b/audit.md"));
}

TEST(Cli, AuditOfDiveFaceSizedSetIsFast) {
  ft::TempDir dir("cli_big");
  ft::spit(dir / "sc.json", R"({"version":1,"seed":8,"groups":[
    {"id":"AM","mated_mean":0.5,"mated_sd":0.12,"nonmated_mean":0.13,"nonmated_sd":0.1,"n_mated":4000,"n_nonmated":4000},
    {"id":"AW","mated_mean":0.5,"mated_sd":0.12,"nonmated_mean":0.06,"nonmated_sd":0.1,"n_mated":4000,"n_nonmated":4000},
    {"id":"BM","mated_mean":0.48,"mated_sd":0.12,"nonmated_mean":0.04,"nonmated_sd":0.1,"n_mated":4000,"n_nonmated":4000},
    {"id":"BW","mated_mean":0.47,"mated_sd":0.12,"nonmated_mean":0.05,"nonmated_sd":0.1,"n_mated":4000,"n_nonmated":4000},
    {"id":"CM","mated_mean":0.49,"mated_sd":0.12,"nonmated_mean":0.035,"nonmated_sd":0.1,"n_mated":4000,"n_nonmated":4000},
    {"id":"CW","mated_mean":0.49,"mated_sd":0.12,"nonmated_mean":0.045,"nonmated_sd":0.1,"n_mated":4000,"n_nonmated":4000}]})");
  ASSERT_EQ(cli({"simulate", "--scenario", dir / "sc.json", "--out", dir / "s.csv"}).code, 0);
  const auto start = std::chrono::steady_clock::now();
  auto r = cli({"audit", "--scores", dir / "s.csv", "--out", dir / "a"});
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(took.count(), 5.0);
  auto doc = json::parse(ft::slurp(dir / "a/audit.json"));
  EXPECT_EQ(doc["flagged_groups"], json({"AM"}));
}

TEST(Cli, PipelineWritesAllArtifactsAndIsByteStable) {
  ft::TempDir dir("cli_pipe");
  const std::vector<std::string> base{"pipeline", "--scenario", src("scenarios/biased_diveface.json"), "--mitigation",
                                      src("scenarios/mitigation_targeted.json"), "--config",
                                      src("configs/run_default.json"), "--out"};
  auto args = base;
  args.push_back(dir / "one");
  auto r = cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  args.back() = dir / "two";
  ASSERT_EQ(cli(args).code, 0);
  for (const char* name : {"before.json", "before.md", "after.json", "after.md", "delta.json", "delta.md"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / ("one/" + std::string(name)))) << name;
    EXPECT_EQ(ft::slurp(dir / ("one/" + std::string(name))), ft::slurp(dir / ("two/" + std::string(name)))) << name;
  }
  auto delta = json::parse(ft::slurp(dir / "one/delta.json"));
  EXPECT_EQ(delta["identified_groups"], json({"AM"}));
  EXPECT_EQ(delta["metric_deltas"][0]["garbe_verdict"], "improved");
  EXPECT_FALSE(delta["garbe_regression"].get<bool>());
  auto before = json::parse(ft::slurp(dir / "one/before.json"));
  EXPECT_EQ(before["stage"], "before");
  EXPECT_EQ(before["command"], "pipeline");
}

TEST(Cli, PipelineOvercorrectionIsReportedAsRegression) {
  ft::TempDir dir("cli_over");
  auto r = cli({"pipeline", "--scenario", src("scenarios/biased_diveface.json"), "--mitigation",
                src("scenarios/mitigation_overcorrect.json"), "--out", dir / "o"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto delta = json::parse(ft::slurp(dir / "o/delta.json"));
  EXPECT_EQ(delta["metric_deltas"][0]["garbe_verdict"], "regressed");
  EXPECT_TRUE(delta["garbe_regression"].get<bool>());
}

TEST(Cli, PipelineUnknownTargetNamesTheStage) {
  ft::TempDir dir("cli_unknown");
  ft::spit(dir / "mit.json", R"({"version":1,"mode":"targeted","target_groups":["ZZ"]})");
  auto r = cli({"pipeline", "--scenario", src("scenarios/biased_diveface.json"), "--mitigation", dir / "mit.json",
                "--out", dir / "o"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("fine-tuning"), std::string::npos);
  EXPECT_NE(r.err.find("ZZ"), std::string::npos);
}

TEST(Cli, PipelineHonoursSeedOverride) {
  ft::TempDir dir("cli_pipe_seed");
  const std::vector<std::string> args{"pipeline", "--scenario", src("scenarios/biased_diveface.json"), "--mitigation",
                                      src("scenarios/mitigation_null.json"), "--out"};
  auto a = args;
  a.push_back(dir / "plain");
  ASSERT_EQ(cli(a).code, 0);
  SeedOverride env("99");
  a.back() = dir / "seeded";
  ASSERT_EQ(cli(a).code, 0);
  EXPECT_NE(ft::slurp(dir / "plain/before.json"), ft::slurp(dir / "seeded/before.json"));
  auto delta = json::parse(ft::slurp(dir / "seeded/delta.json"));
  EXPECT_EQ(delta["scenario"]["seed"], 99);
}
