// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <iostream>

#include "CLI11.hpp"
#include "latlab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"latlab acceptance criteria"};
  std::vector<int> ids;
  latlab::acceptance::Options opt;
  app.add_option("--criterion", ids, "criterion ids (default: all)")->check(CLI::Range(1, latlab::acceptance::kCriterionCount));
  app.add_flag("--quick", opt.quick, "reduced grids");
  app.add_option("--threads", opt.threads, "worker threads");
  app.add_option("--seed", opt.seed, "master seed");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int i = 1; i <= latlab::acceptance::kCriterionCount; ++i) ids.push_back(i);
  auto results = latlab::acceptance::run_suite(opt, ids, &std::cout);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}
