#ifndef LATLAB_CLI_HPP
#define LATLAB_CLI_HPP

#include <deque>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latlab/acceptance.hpp"
#include "latlab/errors.hpp"
#include "latlab/experiment.hpp"

namespace latlab::cli {

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

// Command-line values gathered into an experiment's key-value parameters.
struct Collected {
  // Deques: CLI11 binds to element addresses, which must survive later insertions.
  std::deque<std::pair<std::string, std::string>> scalars;
  std::deque<std::pair<std::string, std::vector<std::string>>> lists;
  std::deque<std::pair<std::string, bool>> flags;
};

inline void add_scalar(CLI::App* app, Collected& c, const std::string& flag, const std::string& key,
                       const std::string& help) {
  c.scalars.emplace_back(key, "");
  app->add_option(flag, c.scalars.back().second, help);
}

inline void add_list(CLI::App* app, Collected& c, const std::string& flag, const std::string& key,
                     const std::string& help) {
  c.lists.emplace_back(key, std::vector<std::string>{});
  app->add_option(flag, c.lists.back().second, help)->delimiter(',');
}

inline void add_flag(CLI::App* app, Collected& c, const std::string& flag, const std::string& key,
                     const std::string& help) {
  c.flags.emplace_back(key, false);
  app->add_flag(flag, c.flags.back().second, help);
}

inline Params to_params(const Collected& c) {
  Params p;
  for (const auto& [k, v] : c.scalars)
    if (!v.empty()) p.set(k, v);
  for (const auto& [k, v] : c.lists)
    if (!v.empty()) p.set(k, join(v));
  for (const auto& [k, v] : c.flags)
    if (v) p.set(k, "true");
  return p;
}

}  // namespace detail

/// Entry point of the `latlab` tool. Returns the process exit code:
/// 0 pass, 1 check failure, 2 input error, 3 resource cap.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"latlab: lattice counting, lifting, tree and graph-spectral experiments"};
  app.require_subcommand(1);
  GlobalOptions global;
  std::int64_t seed = 1;
  unsigned threads = default_threads();
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", seed, "master seed for randomized experiments");
  app.add_flag("--quick", global.quick, "reduced grids");
  app.add_option("--out-dir", global.out_dir, "write CSV tables and report.json here instead of stdout");
  app.add_option("--format", global.format, "report format for --out-dir")->check(CLI::IsMember({"csv", "json"}));

  std::deque<std::pair<std::string, detail::Collected>> subs;
  auto make = [&](const std::string& name, const std::string& help) {
    subs.emplace_back(name, detail::Collected{});
    return std::pair{app.add_subcommand(name, help), &subs.back().second};
  };

  {
    auto [s, c] = make("count", "lattice-point counts in congruence subgroups; CSV bound,count,reference,ratio");
    detail::add_scalar(s, *c, "--group", "group", "sl2 | sl3");
    detail::add_scalar(s, *c, "--kind", "kind", "principal | gamma0 | gamma2");
    detail::add_scalar(s, *c, "--level", "level", "level N");
    detail::add_list(s, *c, "--norm-bound", "norm_bound", "entry bounds T (comma list)");
    detail::add_list(s, *c, "--length-bound", "length_bound", "length bounds d0 (comma list)");
    detail::add_scalar(s, *c, "--method", "method", "brute | fast | both (norm); fixed-point | conjugator | both (length)");
    detail::add_scalar(s, *c, "--length", "length", "cartan | log_norm");
    detail::add_list(s, *c, "--conjugator", "conjugator", "conjugator y, entries row by row");
  }
  {
    auto [s, c] = make("lift", "coverage of the quotient by small-norm elements; CSV T,ball_size,covered,fraction");
    detail::add_scalar(s, *c, "--level", "level", "level N");
    detail::add_scalar(s, *c, "--spec", "spec", "principal | gamma0");
    detail::add_list(s, *c, "--t-grid", "t_grid", "norm bounds T (default: every T up to full coverage)");
    detail::add_flag(s, *c, "--annulus", "annulus", "use T/2 < |gamma| <= T");
    detail::add_list(s, *c, "--targets", "targets", "coverage fractions for crossing exponents");
  }
  {
    auto [s, c] = make("diameter", "distance distribution of a graph; CSV distance,pairs");
    detail::add_scalar(s, *c, "--graph-file", "graph_file", "edge list, one 'u v' pair per line");
    detail::add_scalar(s, *c, "--family", "family", "file | lps | cayley | random | cycle | complete | petersen");
    detail::add_scalar(s, *c, "--params", "params", "family parameters, e.g. 5,13");
    detail::add_list(s, *c, "--eps", "eps", "epsilon grid");
    detail::add_scalar(s, *c, "--sample-sources", "sample_sources", "BFS sources for graphs above 5000 vertices");
  }
  {
    auto [s, c] = make("tree", "regular-tree ball intersections; CSV d,count,bound,ratio");
    detail::add_scalar(s, *c, "--q", "q", "branching q (degree q+1)");
    detail::add_scalar(s, *c, "--radius", "radius", "radius r <= 12");
    detail::add_flag(s, *c, "--check-convolution", "check_convolution", "check count <= slack q^{(2r-d)/2}");
    detail::add_scalar(s, *c, "--slack", "slack", "constant for the check");
  }
  {
    auto [s, c] = make("spectra", "adjacency / non-backtracking spectra and density profiles");
    detail::add_scalar(s, *c, "--family", "family", "lps | cayley | random | cycle | complete | petersen | file");
    detail::add_scalar(s, *c, "--params", "params", "family parameters, e.g. 5,13 or a file path");
    detail::add_flag(s, *c, "--nb", "nb", "include the non-backtracking spectrum");
    detail::add_flag(s, *c, "--profile", "profile", "emit the M(p) profile CSV p,M,bound");
    detail::add_list(s, *c, "--p-grid", "p_grid", "p values for the profile");
    detail::add_scalar(s, *c, "--nb-method", "nb_method", "auto | ihara | direct");
  }
  {
    auto [s, c] = make("xi", "Monte-Carlo Xi_p(a_t) in SL2(R); CSV t,p,estimate,std_error,upper_bound,lower_bound");
    detail::add_list(s, *c, "--t", "t", "translation lengths t");
    detail::add_scalar(s, *c, "--p", "p", "exponent p >= 2 (inf allowed)");
    detail::add_scalar(s, *c, "--samples", "samples", "Monte-Carlo samples (>= 1000)");
  }

  std::vector<int> criteria;
  auto* accept = app.add_subcommand("accept", "run the acceptance criteria, one PASS/FAIL line each");
  accept->add_option("--criterion", criteria, "criterion ids (default: all)")->check(CLI::Range(1, acceptance::kCriterionCount));

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run every experiment in an INI config file");
  run_cmd->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::input_error);
  }

  global.threads = threads;
  global.seed = static_cast<std::uint64_t>(seed);
  auto finish_report = [&](const RunReport& rep) {
    if (rep.global.out_dir.empty()) {
      for (const auto& r : rep.results)
        if (!r.tables.empty()) write_csv(out, r.tables.back(), r.hash, rep.global.seed);
    }
    print_summary(err, rep);
    return rep.passed() ? 0 : static_cast<int>(ExitCode::check_failure);
  };

  try {
    if (accept->parsed()) {
      acceptance::Options o;
      o.quick = global.quick;
      o.threads = global.threads;
      if (app.get_option("--seed")->count()) o.seed = global.seed;
      if (criteria.empty())
        for (int i = 1; i <= acceptance::kCriterionCount; ++i) criteria.push_back(i);
      auto results = acceptance::run_suite(o, criteria, &out);
      bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
      return ok ? 0 : static_cast<int>(ExitCode::check_failure);
    }
    if (run_cmd->parsed()) {
      auto cfg = parse_config_file(config_path);
      // Command-line globals override the [global] section when given explicitly.
      if (app.get_option("--seed")->count()) cfg.global.seed = global.seed;
      if (app.get_option("--threads")->count()) cfg.global.threads = global.threads;
      if (app.get_option("--out-dir")->count()) cfg.global.out_dir = global.out_dir;
      if (app.get_option("--format")->count()) cfg.global.format = global.format;
      if (global.quick) cfg.global.quick = true;
      return finish_report(run(cfg));
    }
    for (auto& [name, collected] : subs) {
      if (!app.get_subcommand(name)->parsed()) continue;
      RunConfig cfg{global, {{name, "cli", detail::to_params(collected)}}};
      return finish_report(run(cfg));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::check_failure);
  }
  return static_cast<int>(ExitCode::input_error);
}

}  // namespace latlab::cli

#endif
