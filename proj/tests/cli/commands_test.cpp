#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"

namespace {

using namespace affdim::cli;

RunConfig load(const char* name) { return load_config(std::string(AFFDIM_CONFIG_DIR) + "/" + name); }

RunConfig quick(const char* name) {
  auto c = load(name);
  c.lyapunov.steps = 2000;
  c.lyapunov.trials = 5;
  c.pipeline.lyapunov = c.lyapunov;
  c.pipeline.samples = 20000;
  c.pipeline.local.centers = 60;
  c.pipeline.projection_samples = 3;
  return c;
}

TEST(Lyapunov, CantorSpectrumAndConservation) {
  const auto r = cmd_lyapunov(quick("cantor.json"), {});
  EXPECT_EQ(r.exit_code, kSuccess);
  const auto& chi = r.results["chi"];
  ASSERT_EQ(chi.size(), 1U);
  EXPECT_NEAR(chi[0]["value"].get<double>(), std::log(3.0), 1e-9);
  EXPECT_TRUE(r.results["conservation"]["within_3_stderr"].get<bool>());
}

TEST(Lyapunov, WritesPartialSumCsv) {
  const std::string path = ::testing::TempDir() + "affdim_partial.csv";
  CommandOptions o;
  o.csv = path;
  cmd_lyapunov(quick("stp.json"), o);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "trial,partial_sum_1,partial_sum_2,partial_sum_3");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 5);
  std::remove(path.c_str());
}

TEST(Lyapunov, SingleTrialWarns) {
  auto c = quick("cantor.json");
  c.lyapunov.trials = 1;
  const auto r = cmd_lyapunov(c, {});
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Domination, StpConfig) {
  const auto r = cmd_domination(load("stp.json"), {});
  EXPECT_TRUE(r.results["all_stp"].get<bool>());
  const auto& d = r.results["domination"]["dominated_indices"];
  ASSERT_EQ(d.size(), 2U);
  EXPECT_EQ(d[0]["value"].get<double>(), 1.0);
  EXPECT_EQ(d[1]["value"].get<double>(), 2.0);
}

TEST(Domination, BudgetExceededIsReported) {
  auto c = load("stp.json");
  c.domination.budget = 10;
  const auto r = cmd_domination(c, {});
  EXPECT_EQ(r.exit_code, kSuccess);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Dim, AssumeSscRefusedOnOverlap) {
  CommandOptions o;
  o.assume_ssc = true;
  EXPECT_THROW(cmd_dim(quick("overlap.json"), o), UsageError);
}

TEST(Dim, OverlapIsConditional) {
  const auto r = cmd_dim(quick("overlap.json"), {});
  EXPECT_EQ(r.exit_code, kSuccess);
  bool conditional = false;
  for (const auto& w : r.warnings) conditional |= w.find("conditional") != std::string::npos;
  EXPECT_TRUE(conditional);
}

TEST(Dim, HistogramAndCloudFiles) {
  CommandOptions o;
  o.histogram = ::testing::TempDir() + "affdim_hist.csv";
  o.cloud = ::testing::TempDir() + "affdim_cloud.csv";
  cmd_dim(quick("cantor.json"), o);
  std::ifstream hist(*o.histogram);
  std::string header;
  std::getline(hist, header);
  EXPECT_EQ(header, "series,sample,center,slope");
  std::ifstream cloud(*o.cloud);
  std::getline(cloud, header);
  EXPECT_EQ(header, "x1,word,depth");
  std::remove(o.histogram->c_str());
  std::remove(o.cloud->c_str());
}

TEST(Report, DeterministicOmitsTimestamp) {
  const auto c = quick("cantor.json");
  const auto r = cmd_lyapunov(c, {});
  const auto det = make_report("lyapunov", c, r, true);
  EXPECT_FALSE(det.contains("generated_at"));
  EXPECT_TRUE(make_report("lyapunov", c, r, false).contains("generated_at"));
  EXPECT_EQ(det["schema_version"], 1);
  EXPECT_EQ(det["config"]["resolved"], c.resolved());
}

TEST(Run, ExitCodes) {
  const char* none[] = {"affine-dim"};
  EXPECT_EQ(run(1, none), kUsageError);
  const char* missing[] = {"affine-dim", "lyapunov", "--config", "/nonexistent.json"};
  EXPECT_EQ(run(4, missing), kUsageError);
}

}  // namespace
