#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "latlab/cli.hpp"

using namespace latlab;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "latlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int run_binary(const std::string& args) {
  std::string cmd = std::string(LATLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, TreePrintsCsv) {
  auto r = invoke({"tree", "--q", "2", "--radius", "3", "--check-convolution"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("d,count,bound,ratio\n0,", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("#config-hash="), std::string::npos);
  EXPECT_NE(r.err.find("convolution within slack: true"), std::string::npos) << r.err;
}

TEST(Cli, CountBothPasses) {
  auto r = invoke({"count", "--level", "2", "--norm-bound", "10,20", "--method", "both"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("fast == brute: true"), std::string::npos);
  EXPECT_NE(r.out.find("10,"), std::string::npos);
}

TEST(Cli, CheckFailureExitsOne) {
  auto r = invoke({"tree", "--q", "2", "--radius", "6", "--check-convolution", "--slack", "1.0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(": false"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(invoke({"count", "--level", "0", "--norm-bound", "5"}).code, 2);
  EXPECT_EQ(invoke({"count", "--level", "3"}).code, 2);
  EXPECT_EQ(invoke({"tree", "--q", "abc", "--radius", "3"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"xi", "--t", "1", "--p", "1.5", "--samples", "2000"}).code, 2);
  EXPECT_EQ(invoke({"diameter", "--family", "cycle", "--params", "x"}).code, 2);
}

TEST(Cli, ResourceCapExitsThree) {
  EXPECT_EQ(invoke({"count", "--level", "2", "--norm-bound", "1001"}).code, 3);
  EXPECT_EQ(invoke({"tree", "--q", "2", "--radius", "13"}).code, 3);
}

TEST(Cli, RunWithConfigFile) {
  auto dir = std::filesystem::temp_directory_path() / "latlab_cli_run";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto ini = dir / "exp.ini";
  {
    std::ofstream os(ini);
    os << "[global]\nseed = 4\n\n[tree.a]\nq = 3\nradius = 4\n\n[lift.b]\nlevel = 5\n";
  }
  auto out = dir / "out";
  auto r = invoke({"--out-dir", out.string(), "run", ini.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out / "tree.a.convolution.csv"));
  EXPECT_TRUE(std::filesystem::exists(out / "lift.b.coverage.csv"));
  EXPECT_TRUE(std::filesystem::exists(out / "report.json"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, EmptyConfigExitsZero) {
  auto ini = std::filesystem::temp_directory_path() / "latlab_empty.ini";
  { std::ofstream os(ini); }
  EXPECT_EQ(invoke({"run", ini.string()}).code, 0);
  std::filesystem::remove(ini);
  EXPECT_EQ(invoke({"run", "/nonexistent/x.ini"}).code, 2);
}

TEST(Cli, AcceptPrintsOneLinePerCriterion) {
  auto r = invoke({"accept", "--criterion", "4", "--criterion", "10"});
  EXPECT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(line.rfind("PASS criterion ", 0), 0u) << line;
  }
  EXPECT_EQ(lines, 2);
}

TEST(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_binary("tree --q 2 --radius 4"), 0);
  EXPECT_EQ(run_binary("tree --q 2 --radius 6 --slack 1.0"), 1);
  EXPECT_EQ(run_binary("count --level 0 --norm-bound 3"), 2);
  EXPECT_EQ(run_binary("count --level 2 --norm-bound 2000"), 3);
  EXPECT_EQ(run_binary("--help"), 0);
}

TEST(Acceptance, OffByOneConvolutionFailsCriterionFour) {
  acceptance::Options o;
  o.convolution = +[](int q, int r1, int r2, int d) { return tree_convolution(q, r1, r2, d) + (d == r1 + r2 ? 1u : 0u); };
  auto r = acceptance::run_criterion(4, o);
  EXPECT_FALSE(r.passed);
  EXPECT_NE(r.detail.find("!= BFS"), std::string::npos) << r.detail;
  EXPECT_TRUE(acceptance::run_criterion(4, acceptance::Options{}).passed);
}

TEST(Acceptance, QuickSuiteFinishesInAMinute) {
  acceptance::Options o;
  o.quick = true;
  std::vector<int> ids;
  for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
  auto start = std::chrono::steady_clock::now();
  auto results = acceptance::run_suite(o, ids);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(results.size(), 10u);
  EXPECT_LT(seconds, 60.0);
  for (const auto& r : results) EXPECT_FALSE(r.detail.empty()) << r.id;
}

TEST(Acceptance, UnknownCriterion) {
  EXPECT_THROW(acceptance::criterion_name(11), InputError);
  EXPECT_EQ(invoke({"accept", "--criterion", "11"}).code, 2);
}
