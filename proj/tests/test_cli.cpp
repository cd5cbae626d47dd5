#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mme/cli.hpp"
#include "mme/report.hpp"

namespace mme::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mme");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string example(const char* name) { return (fs::path(MME_EXAMPLES_DIR) / name).string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("mme_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const char* sub) const { return (dir_ / sub).string(); }
  fs::path dir_;
};

TEST_F(CliTest, PowerPrintsRequiredEvents) {
  auto r = invoke({"power", "--p1", "0.5", "--p2", "0.25"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "175\n");
  r = invoke({"power", "--p1", "0.5", "--p2", "0.25", "--sigma", "10"});
  EXPECT_EQ(r.out, "700\n");
  EXPECT_EQ(invoke({"power", "--p1", "0.5", "--p2", "0.5"}).code, 2);
  EXPECT_EQ(invoke({"power", "--p1", "1.5", "--p2", "0.5"}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"rotate"}).code, 2);
  EXPECT_EQ(invoke({"rotate", "--config", out("nope.json")}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"--threads", "0", "power", "--p1", "0.5", "--p2", "0.25"}).code, 2);
}

TEST_F(CliTest, RotatePreferredFrameReportsDetection) {
  const auto r = invoke({"--config", example("rotate_preferred_frame.json"), "--events",
                         "50000", "--out", out("pf"), "rotate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("PreferredFrameDetected"), std::string::npos);
  const auto verdict = nlohmann::json::parse(slurp(dir_ / "pf" / "rotate_verdict.json"));
  EXPECT_EQ(verdict["decision"], "PreferredFrameDetected");
  const std::string csv = slurp(dir_ / "pf" / "rotate_points.csv");
  EXPECT_EQ(csv.substr(0, kPointCsvHeader.size()), kPointCsvHeader);
}

TEST_F(CliTest, RotateRelativisticReportsNoShift) {
  const auto r = invoke({"--config", example("rotate_relativistic.json"), "--events", "50000",
                         "--out", out("rel"), "rotate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("NoShiftDetected"), std::string::npos);
}

TEST_F(CliTest, SizingNoteForCodataWavelength) {
  const auto r = invoke({"--config", example("rotate_1550nm_codata.json"), "--events",
                         "20000", "--out", out("codata"), "rotate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sizing:"), std::string::npos);
  EXPECT_NE(r.out.find("6.449"), std::string::npos);
}

TEST_F(CliTest, OutputsIdenticalAcrossThreadCounts) {
  for (const char* threads : {"1", "3"}) {
    const auto r = invoke({"--config", example("rotate_preferred_frame.json"), "--events",
                           "200000", "--threads", threads, "--out", out(threads), "rotate"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"rotate_verdict.json", "rotate_points.csv"}) {
    EXPECT_EQ(slurp(dir_ / "1" / f), slurp(dir_ / "3" / f)) << f;
  }
}

TEST_F(CliTest, ManifestReproducesRun) {
  ASSERT_EQ(invoke({"--config", example("rotate_preferred_frame.json"), "--events", "30000",
                    "--seed", "42", "--out", out("a"), "rotate"})
                .code,
            0);
  const std::string manifest = (dir_ / "a" / "rotate_manifest.json").string();
  const auto m = nlohmann::json::parse(slurp(manifest));
  EXPECT_EQ(m["master_seed"], 42);
  EXPECT_EQ(m["config"]["events_per_point"], 30000);
  ASSERT_EQ(invoke({"--config", manifest, "--out", out("b"), "rotate"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "rotate_verdict.json"), slurp(dir_ / "b" / "rotate_verdict.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "rotate_points.csv"), slurp(dir_ / "b" / "rotate_points.csv"));
}

TEST_F(CliTest, SweepWritesOneRowPerTimeAndStage) {
  const auto r = invoke({"--config", example("sweep_relativistic.json"), "--events", "5000",
                         "--out", out("sweep"), "sweep"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(dir_ / "sweep" / "sweep.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, kPointCsvHeader);
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 48);
  const auto summary = nlohmann::json::parse(slurp(dir_ / "sweep" / "sweep_summary.json"));
  EXPECT_EQ(summary["points"], 48);
  EXPECT_TRUE(summary["homogeneity"].contains("p_value"));
}

TEST_F(CliTest, SweepRejectsAlignedConfig) {
  EXPECT_EQ(invoke({"--config", example("rotate_relativistic.json"), "--out", out("x"), "sweep"})
                .code,
            2);
}

TEST_F(CliTest, BellCommand) {
  auto r = invoke({"--config", example("bell_ideal.json"), "--events", "100000", "--out",
                   out("bell"), "bell"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "bell" / "bell.json"));
  EXPECT_GT(j["s_value"].get<double>(), 2.6);

  // No CHSH settings in the config.
  EXPECT_EQ(invoke({"--config", example("rotate_relativistic.json"), "--out", out("b2"), "bell"})
                .code,
            2);
  // Zero events: nothing to estimate.
  EXPECT_EQ(invoke({"--config", example("bell_ideal.json"), "--events", "0", "--out",
                    out("b3"), "bell"})
                .code,
            3);
}

}  // namespace
}  // namespace mme::cli
