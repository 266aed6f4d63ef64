#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sbvp/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sbvp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sbvp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kNonlinear = R"toml([problem]
p = 1.0
boundary = "second"
B = "sin_x(0.5)"
f = "constant(1)"
delta = "constant(0.5)"
)toml";

}  // namespace

TEST_F(CliTest, CertifyReportsAllPass) {
  const auto r = run({"certify", "--kind", "first", "--eps", "0.5", "--p", "1", "--grid", "128"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["all_passed"].get<bool>());
  EXPECT_EQ(j["reports"].size(), 1u);
}

TEST_F(CliTest, CertifyFlagsThePrintedNeumannForm) {
  const auto r = run({"certify", "--kind", "second", "--variant", "as_printed"});
  EXPECT_EQ(r.code, sbvp::cli::kCertification);
  EXPECT_FALSE(json::parse(r.out)["all_passed"].get<bool>());
}

TEST_F(CliTest, MissingConfigIsExitTwo) {
  const auto r = run({"solve", "--config", path("nope.toml")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "config_not_found");
}

TEST_F(CliTest, BetaNotBelowPIsExitThree) {
  const auto cfg = write("bad.toml", "[problem]\np = 1.0\nB = \"sin_x(1.5)\"\n");
  const auto r = run({"solve", "--config", cfg});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "condition_c2_violated");
}

TEST_F(CliTest, LargeEpsIsExitFour) {
  const auto cfg = write("p.toml", "[problem]\np = 1.0\nboundary = \"second\"\nB = \"sin_x(0.99)\"\n");
  const auto r = run({"solve", "--config", cfg, "--eps", "1", "--n", "64"});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "no_contraction");
}

TEST_F(CliTest, UsageErrorsAreExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"paths", "--n", "abc"}).code, 2);
  EXPECT_EQ(run({"certify", "--kind", "neumann"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, SolveWritesCsvSidecarAndDiagnostics) {
  const auto cfg = write("p.toml", kNonlinear);
  const auto out = path("sol.csv");
  const auto r = run({"solve", "--config", cfg, "--eps", "0.1", "--seed", "5", "--n", "256", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto diag = json::parse(r.err);
  EXPECT_TRUE(diag["converged"].get<bool>());
  EXPECT_LE(diag["theta_est"].get<double>(), diag["contraction_bound"].get<double>() + 0.05);
  const auto csv = slurp(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,xdot");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 258);
  const auto side = json::parse(slurp(out + ".config.json"));
  EXPECT_EQ(side["run"]["seed"], 5);
  EXPECT_EQ(side["problem"]["beta_star"], 0.5);

  // Re-running from the echoed config reproduces the output bit for bit.
  const auto again = path("again.csv");
  ASSERT_EQ(run({"solve", "--config", out + ".config.json", "--out", again}).code, 0);
  EXPECT_EQ(slurp(again), csv);
}

TEST_F(CliTest, ConvergeTableAndSummary) {
  const auto cfg = write("p.toml", kNonlinear);
  const auto out = path("table.csv");
  const auto r = run({"converge", "--config", cfg, "--ladder", "1e-1,1e-2", "--paths", "4", "--n", "128",
                      "--seed", "7", "--out", out, "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = json::parse(r.out);
  EXPECT_EQ(summary["ladder"].size(), 2u);
  const auto csv = slurp(out);
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, "eps,seed,sup_err");
  EXPECT_EQ(first.substr(0, first.find(',', first.find(',') + 1)), "1.0000000000000001e-01,7");

  const auto again = path("again.csv");
  ASSERT_EQ(run({"converge", "--config", cfg, "--ladder", "1e-1,1e-2", "--paths", "4", "--n", "128",
                 "--seed", "7", "--out", again, "--threads", "1"})
                .code,
            0);
  EXPECT_EQ(slurp(again), csv);
}

TEST_F(CliTest, LimitsAndPaths) {
  const auto cfg = write("p.toml", kNonlinear);
  const auto r = run({"limits", "--config", cfg, "--seed", "3", "--n", "128"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["eta"]["deterministic"].get<double>(), -1.0, 1e-15);
  EXPECT_TRUE(j.contains("zeta"));

  const auto p = run({"paths", "--n", "8", "--seed", "2", "--count", "2"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(std::count(p.out.begin(), p.out.end(), '\n'), 1 + 2 * 9);
}

TEST_F(CliTest, GreensTable) {
  const auto out = path("g.csv");
  const auto r = run({"greens", "--kind", "periodic", "--eps", "0.5", "--grid", "8", "--out", out, "--certify"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["certificate"]["all_passed"].get<bool>());
  const auto csv = slurp(out);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 81);
  EXPECT_TRUE(fs::exists(out + ".config.json"));
}
