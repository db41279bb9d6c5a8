#include <gtest/gtest.h>
#include <gmock/gmock.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "lumi/errors.hpp"
#include "lumi/pipeline.hpp"

using namespace lumi;
using ::testing::HasSubstr;

namespace {

PipelineResult run(const std::string& name, Command cmd = Command::Run,
                   PipelineOptions opt = {}) {
  const auto s = with_overrides(load_scenario(test::scenario_path(name)), opt);
  return run_pipeline(s, cmd, opt);
}

}  // namespace

TEST(Pipeline, ExitCodes) {
  EXPECT_EQ(exit_code_for(false, false), kExitPass);
  EXPECT_EQ(exit_code_for(false, true), kExitUnknown);
  EXPECT_EQ(exit_code_for(true, true), kExitFalse);
  EXPECT_STREQ(command_name(Command::FrameStats), "frame-stats");
}

TEST(Pipeline, GoldenExplore1d) {
  const auto r = run("explore_1d");
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto& v = r.reports.at("verdicts.txt");
  EXPECT_THAT(v, HasSubstr("<> sp(UX): TRUE\n"));
  EXPECT_THAT(v, HasSubstr("K[r1] sp(U1) -> sp(U1): TRUE\n"));
  EXPECT_THAT(r.reports.at("tasks.txt"), HasSubstr("task: exploration\n"));
  EXPECT_EQ(r.reports.count("traces.txt"), 1u);
  const auto j = nlohmann::json::parse(r.reports.at("summary.json"));
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_EQ(j["verdicts"]["<> sp(UX)"], "TRUE");
  EXPECT_EQ(j["runs"], j["closed_runs"]);
}

TEST(Pipeline, NonLiveSweepFails) {
  const auto r = run("explore_sweep_late");
  EXPECT_EQ(r.exit_code, kExitFalse);
  EXPECT_THAT(r.reports.at("tasks.txt"), HasSubstr("liveness: FALSE"));
}

TEST(Pipeline, OscillatingGatheringFails) {
  const auto r = run("gather_oscillate");
  EXPECT_EQ(r.exit_code, kExitFalse);
  EXPECT_THAT(r.reports.at("tasks.txt"), HasSubstr("agreement: FALSE"));
}

TEST(Pipeline, CheckCommandSingleFormula) {
  PipelineOptions opt;
  opt.formula = "<> sp({3})";
  const auto r = run("explore_1d", Command::Check, opt);
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_EQ(r.reports.count("tasks.txt"), 0u);
  EXPECT_THAT(r.reports.at("verdicts.txt"), HasSubstr("<> sp({3}): TRUE"));
  opt.formula = "sp(UX)";
  const auto bad = run("explore_1d", Command::Check, opt);
  EXPECT_EQ(bad.exit_code, kExitFalse);
  EXPECT_THAT(bad.reports.at("verdicts.txt"), HasSubstr("witness"));
}

TEST(Pipeline, UndeclaredRobotIsInputError) {
  PipelineOptions opt;
  opt.formula = "K[r4] sp(UX)";
  EXPECT_THROW(run("explore_1d", Command::Check, opt), InputError);
}

TEST(Pipeline, HorizonOverrideCanOpenRuns) {
  PipelineOptions opt;
  opt.horizon = 1;
  const auto r = run("explore_1d", Command::Run, opt);
  EXPECT_EQ(r.exit_code, kExitUnknown);
}

TEST(Pipeline, CapOverrideRaises) {
  PipelineOptions opt;
  opt.cap = 2;
  EXPECT_THROW(run("gather_ssync", Command::Run, opt), CapExceeded);
}

TEST(Pipeline, FrameStatsAndEquiv) {
  const auto f = run("flooding", Command::FrameStats);
  EXPECT_THAT(f.reports.at("frame_stats.txt"), HasSubstr("points:"));
  EXPECT_THAT(f.reports.at("frame_stats.txt"), HasSubstr("r2 classes:"));
  const auto e = run("walker_jump2", Command::Equiv);
  EXPECT_EQ(e.exit_code, kExitFalse);
  EXPECT_THAT(e.reports.at("equiv.txt"), HasSubstr("NOT EQUAL"));
  EXPECT_THAT(e.reports.at("equiv.txt"), HasSubstr("machine-only"));
}

TEST(Pipeline, JobsDoNotChangeReports) {
  PipelineOptions one, many;
  many.jobs = 3;
  for (const char* name : {"gather_ssync", "surveillance_pair", "walker_hybrid_ssync"}) {
    EXPECT_EQ(run(name, Command::Run, one).reports, run(name, Command::Run, many).reports) << name;
  }
}

TEST(Pipeline, WriteReportsAddsHeaderToText) {
  const auto r = run("explore_1d");
  const auto dir = std::filesystem::temp_directory_path() / "lumi_pipeline_test";
  std::filesystem::remove_all(dir);
  write_reports(r, dir.string(), "# header");
  std::ifstream in(dir / "verdicts.txt");
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str().rfind("# header\n", 0), 0u);
  EXPECT_EQ(strip_header(buf.str()), r.reports.at("verdicts.txt"));
  std::ifstream js(dir / "summary.json");
  std::stringstream jbuf;
  jbuf << js.rdbuf();
  EXPECT_EQ(jbuf.str(), r.reports.at("summary.json"));
  std::filesystem::remove_all(dir);
}
