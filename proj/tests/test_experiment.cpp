#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "latlab/experiment.hpp"

using namespace latlab;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  for (const auto& t : r.tables) write_csv(os, t, r.hash, 0);
  return os.str();
}

const Check* find_check(const ExperimentResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Params, TypedAccessAndUnknownKeys) {
  Params p({{"a", "3"}, {"b", "1.5, 2;inf"}, {"c", "yes"}, {"d", "x"}});
  EXPECT_EQ(p.integer("a"), 3);
  auto b = p.reals("b");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_TRUE(std::isinf(b[2]));
  EXPECT_TRUE(p.boolean("c", false));
  EXPECT_THROW(p.finish("test"), InputError);  // d never read
  Params q(std::vector<std::pair<std::string, std::string>>{{"n", "abc"}});
  EXPECT_THROW(q.integer("n"), InputError);
  EXPECT_THROW(q.integer("missing"), InputError);
}

TEST(Config, SectionsKeepFileOrder) {
  auto cfg = parse(
      "[global]\nseed = 9\nthreads = 2\nquick = true\n"
      "[tree.small]\nq = 2\nradius = 3\n"
      "[count]\nlevel = 2\nnorm_bound = 5\n");
  EXPECT_EQ(cfg.global.seed, 9u);
  EXPECT_EQ(cfg.global.threads, 2u);
  EXPECT_TRUE(cfg.global.quick);
  ASSERT_EQ(cfg.experiments.size(), 2u);
  EXPECT_EQ(cfg.experiments[0].kind, "tree");
  EXPECT_EQ(cfg.experiments[0].label, "small");
  EXPECT_EQ(cfg.experiments[1].kind, "count");
  EXPECT_EQ(cfg.experiments[1].label, "count");
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("[bogus.x]\na = 1\n"), InputError);
  EXPECT_THROW(parse("[global]\ncolour = red\n"), InputError);
  EXPECT_THROW(parse("[global]\nformat = xml\n"), InputError);
  EXPECT_THROW(parse_config_file("/nonexistent/latlab.ini"), InputError);
  auto cfg = parse("[tree.t]\nq = 2\nradius = 3\nbogus = 1\n");
  EXPECT_THROW(run(cfg), InputError);
}

TEST(Config, EmptyRunsNothingAndPasses) {
  auto rep = run(parse(""));
  EXPECT_TRUE(rep.results.empty());
  EXPECT_TRUE(rep.passed());
}

TEST(Experiments, CountBothMethodsAgree) {
  auto rep = run(parse("[count.sx]\nlevel = 3\nnorm_bound = 10,40,90\nmethod = both\n"));
  ASSERT_EQ(rep.results.size(), 1u);
  auto* c = find_check(rep.results[0], "fast == brute");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->passed);
  EXPECT_EQ(rep.results[0].tables[0].rows.size(), 3u);
}

TEST(Experiments, LengthProfileMethodsAgree) {
  auto rep = run(parse("[count.fp]\nkind = gamma0\nlevel = 5\nlength_bound = 1,2,3,4,5,6\nmethod = both\n"));
  auto* c = find_check(rep.results[0], "direct == fixed-point");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->passed);
}

TEST(Experiments, TreeReportsConstant) {
  auto rep = run(parse("[tree.q2]\nq = 2\nradius = 8\n"));
  const auto& r = rep.results[0];
  EXPECT_TRUE(r.passed());
  ASSERT_TRUE(r.measured.contains("convolution_constant"));
  EXPECT_LE(r.measured["convolution_constant"].get<double>(), 3.0);
  EXPECT_EQ(r.tables[0].header, (std::vector<std::string>{"d", "count", "bound", "ratio"}));
}

TEST(Experiments, ErrorsNameTheStage) {
  try {
    run(parse("[count.bad]\nlevel = 0\nnorm_bound = 3\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ExitCode::input_error);
    EXPECT_NE(std::string(e.what()).find("[count.bad]"), std::string::npos) << e.what();
  }
  try {
    run(parse("[count.big]\nlevel = 2\nnorm_bound = 5000\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ExitCode::resource_cap);
  }
}

TEST(Experiments, CsvTrailer) {
  auto rep = run(parse("[tree.t]\nq = 3\nradius = 2\n"));
  std::ostringstream os;
  write_csv(os, rep.results[0].tables[0], rep.results[0].hash, 77);
  std::string s = os.str();
  EXPECT_EQ(s.rfind("d,count,bound,ratio\n", 0), 0u);
  EXPECT_NE(s.find("#config-hash=" + rep.results[0].hash + "\n"), std::string::npos);
  EXPECT_NE(s.find("#seed=77\n"), std::string::npos);
}

TEST(Experiments, DeterministicAcrossRunsAndThreads) {
  const std::string text =
      "[count.c]\nlevel = 4\nnorm_bound = 20,60\nmethod = both\n"
      "[lift.l]\nlevel = 7\nt_grid = 1,2,4,8\n"
      "[xi.x]\nt = 1,3\nsamples = 20000\n"
      "[diameter.d]\nfamily = random\nparams = 200,3\n"
      "[spectra.s]\nfamily = random\nparams = 60,3\nnb = true\nprofile = true\n";
  auto a = parse("[global]\nthreads = 1\n" + text);
  auto b = parse("[global]\nthreads = 3\n" + text);
  auto ra = run(a), rb = run(b), rc = run(a);
  ASSERT_EQ(ra.results.size(), 5u);
  for (std::size_t i = 0; i < ra.results.size(); ++i) {
    EXPECT_EQ(csv_of(ra.results[i]), csv_of(rc.results[i])) << ra.results[i].kind;
    EXPECT_EQ(csv_of(ra.results[i]), csv_of(rb.results[i])) << ra.results[i].kind;
    EXPECT_TRUE(ra.results[i].passed()) << ra.results[i].kind;
  }
}

TEST(Experiments, SeedChangesRandomGraphs) {
  auto a = run(parse("[global]\nseed = 1\n[diameter.d]\nfamily = random\nparams = 100,3\n"));
  auto b = run(parse("[global]\nseed = 2\n[diameter.d]\nfamily = random\nparams = 100,3\n"));
  EXPECT_NE(a.results[0].hash, b.results[0].hash);
}

TEST(Experiments, WritesOutputDirectory) {
  auto dir = std::filesystem::temp_directory_path() / "latlab_test_out";
  std::filesystem::remove_all(dir);
  auto cfg = parse("[global]\nout_dir = " + dir.string() + "\nformat = json\n[tree.t]\nq = 2\nradius = 3\n");
  auto rep = run(cfg);
  EXPECT_TRUE(std::filesystem::exists(dir / "tree.t.convolution.csv"));
  ASSERT_TRUE(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  auto j = json::parse(in);
  EXPECT_TRUE(j.contains("results"));
  std::filesystem::remove_all(dir);
}

TEST(Experiments, SpectraOnGraphFile) {
  auto path = std::filesystem::temp_directory_path() / "latlab_petersen.txt";
  {
    std::ofstream os(path);
    write_edge_list(os, petersen_graph());
  }
  auto rep = run(parse("[spectra.file]\nfamily = file\nparams = " + path.string() + "\nnb = true\nprofile = true\n"));
  EXPECT_TRUE(rep.results[0].passed());
  std::filesystem::remove(path);
}
