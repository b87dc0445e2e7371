#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "test_support.hpp"

namespace fvg::cli {
namespace {

namespace fs = std::filesystem;
using fvg::testing::CommandResult;
using fvg::testing::TempDir;
using json = nlohmann::json;

const std::string kCli = FVGRAPH_CLI;

CommandResult cli(const std::string& args) {
  return fvg::testing::run_command("FVGRAPH_LOG=quiet " + kCli + " " + args);
}

/// One JSON record per stdout line.
std::vector<json> records(const std::string& out) {
  std::vector<json> r;
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) r.push_back(json::parse(line));
  }
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (kCli.empty()) GTEST_SKIP() << "command line tool not built";
  }
};

TEST_F(Cli, RunsCavityCase) {
  TempDir tmp;
  const auto dir = fvg::testing::copy_fixture("cavity", tmp);
  const auto r = cli("run " + dir);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto rec = records(r.out);
  ASSERT_FALSE(rec.empty());
  EXPECT_EQ(rec.back()["status"], "ok");
  EXPECT_EQ(rec.back()["steps"], 50);
  EXPECT_LE(rec.back()["max_divergence"].get<double>(), 1e-7);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "0.25" / "U"));
  EXPECT_TRUE(fs::exists(fs::path(dir) / "0.5" / "p"));
  EXPECT_TRUE(fs::exists(fs::path(dir) / "residuals.csv"));
}

TEST_F(Cli, DtOverride) {
  TempDir tmp;
  const auto dir = fvg::testing::copy_fixture("cavity", tmp);
  const auto r = cli("run " + dir + " --dt 0.002 --end-time 0.01 --vtk");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(records(r.out).back()["steps"], 5);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "cavity.vtk"));
  EXPECT_EQ(cli("run " + dir + " --dt 0").exit_code, 2);
}

TEST_F(Cli, MissingPressureFieldExitCode) {
  TempDir tmp;
  const auto dir = fvg::testing::copy_fixture("cavity", tmp);
  fs::remove(fs::path(dir) / "0" / "p");
  const auto r = cli("run " + dir);
  EXPECT_EQ(r.exit_code, 14);
  const auto rec = records(r.out);
  ASSERT_FALSE(rec.empty());
  EXPECT_EQ(rec.back()["status"], "error");
  EXPECT_EQ(rec.back()["error"], "MissingBoundarySpec");
}

TEST_F(Cli, MeshErrorsExitCodes) {
  EXPECT_EQ(cli("mesh-info " + fvg::testing::fixture("bad_point_index")).exit_code, 12);
  TempDir tmp;
  EXPECT_EQ(cli("mesh-info " + (tmp.path() / "nothing").string()).exit_code, 10);
  EXPECT_EQ(cli("mesh-info generator:cavity:0").exit_code, 22);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli("inverse no-such-problem").exit_code, 2);
  EXPECT_EQ(cli("benchmark no-such-case").exit_code, 2);
  EXPECT_EQ(cli("perf").exit_code, 2);
  EXPECT_EQ(cli("perf -n").exit_code, 2);
  EXPECT_EQ(cli("").exit_code, 2);
  EXPECT_EQ(cli("--help").exit_code, 0);
}

TEST_F(Cli, MeshInfoOfGenerator) {
  const auto r = cli("mesh-info generator:cavity:4");
  ASSERT_EQ(r.exit_code, 0);
  const auto rec = records(r.out);
  EXPECT_EQ(rec.back()["cells"], 16);
}

TEST_F(Cli, ConvertRoundTrip) {
  TempDir tmp;
  const auto case_dir = (tmp.path() / "tet").string();
  const auto vtk = (tmp.path() / "back.vtk").string();
  ASSERT_EQ(cli("convert " + fvg::testing::fixture("single_tet.vtk") + " " + case_dir).exit_code, 0);
  EXPECT_TRUE(fs::exists(fs::path(case_dir) / "constant" / "polyMesh" / "owner"));
  ASSERT_EQ(cli("convert " + case_dir + " " + vtk).exit_code, 0);
  EXPECT_EQ(records(cli("mesh-info " + vtk).out).back()["cells"], 1);
}

TEST_F(Cli, PerfRows) {
  TempDir tmp;
  const auto csv = (tmp.path() / "perf.csv").string();
  const auto r = cli("perf -n 2 4 --steps 2 --csv " + csv);
  ASSERT_EQ(r.exit_code, 0);
  const auto rec = records(r.out);
  ASSERT_EQ(rec.size(), 3u);
  EXPECT_EQ(rec[0]["cells"], 4);
  EXPECT_EQ(rec[1]["cells"], 16);
  EXPECT_GT(rec[1]["steps_per_second"].get<double>(), 0.0);
  EXPECT_EQ(rec[2]["status"], "ok");
  const auto text = fvg::testing::read_file(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST_F(Cli, InverseCavityWritesHistory) {
  TempDir tmp;
  const auto r = cli("inverse cavity-lid -n 8 --steps 20 --iterations 3 -o " + tmp.path().string());
  ASSERT_EQ(r.exit_code, 0);
  const auto rec = records(r.out);
  EXPECT_EQ(rec.back()["status"], "ok");
  EXPECT_EQ(rec.back()["iterations"], 3);
  EXPECT_TRUE(fs::exists(tmp.path() / "inverse_cavity_history.csv"));
  EXPECT_TRUE(fs::exists(tmp.path() / "inverse_cavity_parameters.csv"));
}

TEST_F(Cli, BenchmarkPoissonRecords) {
  TempDir tmp;
  const auto r = cli("benchmark poisson3d -n 2 4 -o " + tmp.path().string());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(records(r.out).back()["status"], "ok");
}

}  // namespace
}  // namespace fvg::cli
