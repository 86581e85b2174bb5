#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifndef KTODA_CLI_PATH
#error "KTODA_CLI_PATH must point at the ktoda executable"
#endif

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ktoda_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(KTODA_CLI_PATH) + " " + args + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  static std::vector<std::string> rows(const std::string& file) {
    std::vector<std::string> out;
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
  }

  fs::path dir_;
};

TEST_F(Cli, SimulateWritesOneRowPerStep) {
  ASSERT_EQ(run("simulate --seed 7 --m 8 --t-end 1 --out " + path("t.csv")), 0);
  const auto r = rows(path("t.csv"));
  ASSERT_EQ(r.size(), 1002u);
  EXPECT_EQ(r[0].substr(0, 8), "t,re_a1,");
  EXPECT_EQ(r[1].substr(0, 2), "0,");
}

TEST_F(Cli, StateOutReproducesTheSeededRun) {
  ASSERT_EQ(run("simulate --seed 3 --m 8 --t-end 0.2 --out " + path("a.csv") + " --state-out " +
                path("s.json")),
            0);
  ASSERT_EQ(run("simulate --from " + path("s.json") + " --t-end 0.2 --out " + path("b.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, FixedPointGivesConstantColumns) {
  const Json state{{"a", Json::array({{0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}})},
                   {"b", Json::array({{0, 0}, {0, 0}, {0, 0}})},
                   {"c", Json::array({{0, 0}, {0, 0}})}};
  std::ofstream(path("fp.json")) << state.dump();
  ASSERT_EQ(run("simulate --from " + path("fp.json") + " --c-floor 0 --n-max 2 --t-end 0.1 --out " + path("fp.csv")), 0);
  const auto r = rows(path("fp.csv"));
  ASSERT_EQ(r.size(), 102u);
  // cells 1..18 hold a, b, c; they never change
  const auto lattice = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return std::vector<std::string>(cells.begin() + 1, cells.begin() + 19);
  };
  const auto first = lattice(r[1]);
  EXPECT_EQ(first[0], "0.5");
  for (std::size_t i = 2; i < r.size(); ++i) EXPECT_EQ(lattice(r[i]), first);
}

TEST_F(Cli, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(run("simulate --seed 1 --m 7 --out " + path("x.csv")), 2);
  EXPECT_EQ(run("simulate --seed 1 --h 0.003 --t-end 1 --out " + path("x.csv")), 2);
  EXPECT_EQ(run("polys --seed 1 --m 8 --n-max 4 --out " + path("x.json")), 2);
  EXPECT_EQ(run("simulate --from " + path("missing.json") + " --out " + path("x.csv")), 2);
  EXPECT_EQ(run("simulate --bogus"), 2);
  std::ofstream(path("bad.json")) << "{\"a\": [[1, 0]]}";
  EXPECT_EQ(run("simulate --from " + path("bad.json") + " --out " + path("x.csv")), 2);
}

TEST_F(Cli, NumericalAbortExitsWithThree) {
  // c_1' = c_1 (a_3 - a_1) drives c_1 below the floor before t = 1
  const Json state{{"a", Json::array({{0, 0}, {0, 0}, {-10, 0}, {0, 0}, {0, 0}, {0, 0}})},
                   {"b", Json::array({{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}})},
                   {"c", Json::array({{0.5, 0}, {0.5, 0}, {0.5, 0}, {0.5, 0}})}};
  std::ofstream(path("decay.json")) << state.dump();
  EXPECT_EQ(run("simulate --from " + path("decay.json") + " --n-max 2 --c-floor 0.01 --out " + path("x.csv")), 3);
  EXPECT_NE(slurp(path("stderr.txt")).find("numerical abort"), std::string::npos);
}

TEST_F(Cli, ResolventSweepShape) {
  ASSERT_EQ(run("resolvent --seed 2 --m 12 --t-end 0.5 --angles 6 --t-samples 3 --corollary1 --out " +
                path("r.csv")),
            0);
  const auto r = rows(path("r.csv"));
  ASSERT_EQ(r.size(), 1u + 6u * 3u);
  std::vector<std::string> header;
  {
    std::stringstream ss(r[0]);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  ASSERT_EQ(header.size(), 21u);
  for (std::size_t i = 1; i < r.size(); ++i) {
    std::vector<double> cells;
    std::stringstream ss(r[i]);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    EXPECT_LE(cells[11], 1e-14);
    EXPECT_LE(cells[20], 1e-4);
  }
}

TEST_F(Cli, MomentsAndPolysJson) {
  ASSERT_EQ(run("moments --seed 4 --m 8 --n-max 3 --t-end 0.5 --out " + path("m.json")), 0);
  const auto m = Json::parse(slurp(path("m.json")));
  EXPECT_EQ(m["t"], 0.5);
  ASSERT_EQ(m["moments"].size(), 4u);
  EXPECT_EQ(m["moments"][0]["block"], Json::parse("[[1,0],[0,0],[0,0],[1,0]]"));
  ASSERT_EQ(run("polys --seed 4 --m 10 --n-max 4 --out " + path("p.json")), 0);
  const auto p = Json::parse(slurp(path("p.json")));
  EXPECT_EQ(p["scalar"].size(), 10u);
  EXPECT_EQ(p["vector"].size(), 5u);
}

TEST_F(Cli, FlagsOverrideTheConfigFile) {
  std::ofstream(path("cfg.json")) << R"({"integration": {"m": 8, "t_end": 0.3, "h": 0.01}, "seed": 5})";
  ASSERT_EQ(run("simulate --config " + path("cfg.json") + " --t-end 0.1 --out " + path("c.csv")), 0);
  const auto r = rows(path("c.csv"));
  EXPECT_EQ(r.size(), 12u);
  EXPECT_NE(r[0].find("im_a8,"), std::string::npos);
  EXPECT_EQ(r[0].find("im_a9,"), std::string::npos);
}

TEST_F(Cli, VerifyQuickIsDeterministic) {
  ASSERT_EQ(run("verify --quick --m 12 --no-stress --out " + path("v1.json")), 0);
  ASSERT_EQ(run("verify --quick --m 12 --no-stress --jobs 2 --out " + path("v2.json")), 0);
  EXPECT_EQ(slurp(path("v1.json")), slurp(path("v2.json")));
  const auto v = Json::parse(slurp(path("v1.json")));
  EXPECT_EQ(v["ok"], true);
  EXPECT_FALSE(v["checks"][0].contains("runtime_seconds"));
}

TEST_F(Cli, VerifyControlIsDetected) {
  ASSERT_EQ(run("verify --seed 1 --m 12 --control freeze-b --no-stress --no-convergence --out " +
                path("c.json")),
            0);
  const auto v = Json::parse(slurp(path("c.json")));
  ASSERT_EQ(v["controls"].size(), 1u);
  EXPECT_EQ(v["controls"][0]["detected"], true);
}

}  // namespace
