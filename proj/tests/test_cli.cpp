#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edgeguard/cli.hpp"

using namespace edgeguard;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "edgeguard");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string t1 = std::string(EDGEGUARD_TEST_DATA) + "/t1.json";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("edgeguard_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, GenPaperPreset) {
  CliRun r = run({"gen", "--preset", "paper", "--seed", "7", "-o", at("inst.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  Instance inst = load_instance(at("inst.json"));
  EXPECT_EQ(inst.m, 80);
  EXPECT_EQ(inst.n, 30);
  EXPECT_EQ(inst.gamma, 0.1);
  EXPECT_EQ(inst.theta, 0.8);
  for (double p : inst.phi) EXPECT_EQ(p, 5.0);
}

TEST_F(CliTest, SolveAdEnumOnTwoAreas) {
  CliRun r = run({"solve-ad", "-i", t1, "--k", "1", "--method", "enum"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_NEAR(j["worst_cost"].get<double>(), 46.2, 1e-9);
  EXPECT_EQ(j["critical_set"], Json::array({1}));
}

TEST_F(CliTest, MethodsAgree) {
  for (const char* m : {"duality", "kkt", "enum"}) {
    CliRun r = run({"solve-ad", "-i", t1, "--k", "1", "--method", m, "--beta", "0.2"});
    ASSERT_EQ(r.code, 0) << m << r.err;
    EXPECT_NEAR(Json::parse(r.out)["worst_cost"].get<double>(), 46.4, 1e-6) << m;
  }
}

TEST_F(CliTest, RefusalExitCode) {
  CliRun r = run({"solve-ad", "-i", t1, "--k", "2", "--method", "duality"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("screen"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"solve-ad", "--k", "1"}).code, 1);
  EXPECT_EQ(run({"solve-ad", "-i", t1, "--k", "1", "--method", "simplex"}).code, 1);
  EXPECT_EQ(run({"solve-ad", "-i", at("missing.json"), "--k", "1"}).code, 1);
  EXPECT_EQ(run({"sweep", "--family", "nope"}).code, 1);
  EXPECT_EQ(run({"solve-defender", "-i", t1, "--attack", "3"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, SolverFailureExitCode) {
  CliRun r = run({"solve-ad", "-i", t1, "--k", "1", "--method", "enum", "--enum-cap", "1"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, SolveDefenderWritesCsv) {
  CliRun r = run({"solve-defender", "-i", t1, "--attack", "1", "-o", at("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(Json::parse(r.out)["total"].get<double>(), 46.2, 1e-9);
  std::ifstream u(dir / "d" / "unmet.csv");
  std::string header, first;
  std::getline(u, header);
  std::getline(u, first);
  EXPECT_EQ(first, "1,8,0.8");
}

TEST_F(CliTest, HardenAndSimulate) {
  CliRun h = run({"harden", "-i", t1, "--k", "1", "--scheme", "heuristic"});
  ASSERT_EQ(h.code, 0);
  EXPECT_EQ(Json::parse(h.out)["protected"], Json::array({1}));
  CliRun s = run({"simulate", "-i", t1, "--protect", "1", "--q", "1", "--scenarios", "30", "-o", at("s")});
  ASSERT_EQ(s.code, 0) << s.err;
  Json j = Json::parse(s.out);
  EXPECT_NEAR(j["mean_cost"].get<double>(), 46.2, 1e-9);
  EXPECT_NEAR(j["worst_cost"].get<double>(), 46.2, 1e-9);
  EXPECT_TRUE(fs::exists(dir / "s" / "scenarios.csv"));
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  setenv("EDGEGUARD_OUT", at("envout").c_str(), 1);
  CliRun r = run({"sweep", "--family", "kq", "-i", t1, "--k", "0,1", "--q", "1", "--scenarios", "5"});
  unsetenv("EDGEGUARD_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "envout" / "k-vs-q-grid" / "results" / "k-vs-q-grid.csv"));
}

TEST_F(CliTest, DeterministicZeroesTimes) {
  CliRun r = run({"--deterministic", "solve-ad", "-i", t1, "--k", "1", "--method", "kkt"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["wall_time_s"].get<double>(), 0.0);
}

TEST_F(CliTest, StatsPrintsClosedForms) {
  CliRun r = run({"stats", "--sizes", "80x30"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("kkt,80,30,,,,70630,17660,17790"), std::string::npos) << r.out;
}

TEST_F(CliTest, MatchesLibraryCall) {
  CliRun r = run({"--deterministic", "solve-ad", "-i", t1, "--k", "1", "--method", "duality"});
  AdResult lib = solve_attacker_defender(load_instance(t1), 1, Method::Duality);
  EXPECT_EQ(Json::parse(r.out), result_to_json(lib, false));
}
