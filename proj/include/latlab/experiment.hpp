#ifndef LATLAB_EXPERIMENT_HPP
#define LATLAB_EXPERIMENT_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "latlab/cartan.hpp"
#include "latlab/counting.hpp"
#include "latlab/errors.hpp"
#include "latlab/format.hpp"
#include "latlab/graph.hpp"
#include "latlab/lifting.hpp"
#include "latlab/matgroups.hpp"
#include "latlab/parallel.hpp"
#include "latlab/spectral.hpp"
#include "latlab/trees.hpp"

namespace latlab {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Formatting and tabular output

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw InputError("CsvTable " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }
};

// Header, rows, then the metadata trailer.
inline void write_csv(std::ostream& os, const CsvTable& t, const std::string& config_hash, std::uint64_t seed) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  os << "#config-hash=" << config_hash << '\n' << "#seed=" << seed << '\n';
}

// ---------------------------------------------------------------------------
// Configuration

/// Key-value parameters of one experiment. Every key must be consumed by the
/// experiment; leftovers are reported as schema violations.
class Params {
 public:
  Params() = default;
  explicit Params(std::vector<std::pair<std::string, std::string>> kv) : kv_(std::move(kv)) {}

  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : kv_)
      if (k == key) {
        v = value;
        return;
      }
    kv_.emplace_back(key, value);
  }

  bool has(const std::string& key) const { return raw(key).has_value(); }

  std::string str(const std::string& key, const std::string& fallback) const { return raw(key).value_or(fallback); }

  std::string str(const std::string& key) const {
    auto v = raw(key);
    if (!v) throw InputError("missing required key '" + key + "'");
    return *v;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) const {
    auto v = raw(key);
    if (!v) {
      if (fallback) return *fallback;
      throw InputError("missing required key '" + key + "'");
    }
    return parse_int(key, *v);
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    auto v = raw(key);
    if (!v) {
      if (fallback) return *fallback;
      throw InputError("missing required key '" + key + "'");
    }
    return parse_real(key, *v);
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw InputError("key '" + key + "': expected a boolean, got '" + *v + "'");
  }

  std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> fallback = {}) const {
    auto v = raw(key);
    if (!v) return fallback;
    std::vector<std::int64_t> out;
    for (const auto& item : split(*v)) out.push_back(parse_int(key, item));
    return out;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback = {}) const {
    auto v = raw(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split(*v)) out.push_back(parse_real(key, item));
    return out;
  }

  // Throws on keys nobody asked for.
  void finish(const std::string& kind) const {
    std::string extra;
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) extra += (extra.empty() ? "" : ", ") + k;
    if (!extra.empty()) throw InputError("unknown key(s) for " + kind + ": " + extra);
  }

  const std::vector<std::pair<std::string, std::string>>& items() const { return kv_; }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || c == ' ' || c == ';') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

 private:
  std::optional<std::string> raw(const std::string& key) const {
    used_.insert(key);
    for (const auto& [k, v] : kv_)
      if (k == key) return v;
    return std::nullopt;
  }

  static std::int64_t parse_int(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      auto v = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InputError("key '" + key + "': expected an integer, got '" + s + "'");
    }
  }

  static double parse_real(const std::string& key, const std::string& s) {
    if (s == "inf" || s == "infinity") return kInfinity;
    try {
      std::size_t pos = 0;
      auto v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InputError("key '" + key + "': expected a number, got '" + s + "'");
    }
  }

  std::vector<std::pair<std::string, std::string>> kv_;
  mutable std::set<std::string> used_;
};

struct GlobalOptions {
  std::uint64_t seed = 1;
  unsigned threads = default_threads();
  bool quick = false;
  std::string out_dir;
  std::string format = "csv";  // csv | json
};

struct ExperimentConfig {
  std::string kind;
  std::string label;
  Params params;
};

struct RunConfig {
  GlobalOptions global;
  std::vector<ExperimentConfig> experiments;
};

inline const std::set<std::string> kExperimentKinds{"count", "lift", "diameter", "tree", "spectra", "xi"};

/// INI schema: an optional [global] section (seed, threads, quick, out_dir, format)
/// and one [kind.label] section per experiment, run in file order.
inline RunConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw InputError("config: key '" + section + "' outside any section");
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& [k, v] : body) kv.emplace_back(k, v.data());
    Params p(kv);
    if (section == "global") {
      cfg.global.seed = static_cast<std::uint64_t>(p.integer("seed", 1));
      cfg.global.threads = static_cast<unsigned>(p.integer("threads", default_threads()));
      cfg.global.quick = p.boolean("quick", false);
      cfg.global.out_dir = p.str("out_dir", "");
      cfg.global.format = p.str("format", "csv");
      if (cfg.global.format != "csv" && cfg.global.format != "json")
        throw InputError("config: format must be csv or json");
      p.finish("[global]");
      continue;
    }
    auto dot = section.find('.');
    std::string kind = section.substr(0, dot);
    std::string label = dot == std::string::npos ? kind : section.substr(dot + 1);
    if (!kExperimentKinds.count(kind)) throw InputError("config: unknown experiment kind '" + kind + "'");
    cfg.experiments.push_back({kind, label, std::move(p)});
  }
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  return parse_config(in);
}

inline std::string config_hash(const ExperimentConfig& e, const GlobalOptions& g) {
  std::ostringstream s;
  s << e.kind << '.' << e.label << '\n' << "seed=" << g.seed << '\n' << "quick=" << g.quick << '\n';
  auto items = e.params.items();
  std::sort(items.begin(), items.end());
  for (const auto& [k, v] : items) s << k << '=' << v << '\n';
  return hex64(fnv1a(s.str()));
}

// ---------------------------------------------------------------------------
// Results

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string kind;
  std::string label;
  std::string hash;
  std::vector<Check> checks;
  json measured = json::object();
  std::vector<CsvTable> tables;
  double seconds = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

struct RunReport {
  GlobalOptions global;
  std::vector<ExperimentConfig> config;
  std::vector<ExperimentResult> results;

  bool passed() const {
    return std::all_of(results.begin(), results.end(), [](const ExperimentResult& r) { return r.passed(); });
  }
};

inline json table_json(const CsvTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::object();
    for (std::size_t i = 0; i < t.header.size(); ++i) row[t.header[i]] = r[i];
    rows.push_back(row);
  }
  return rows;
}

inline json report_json(const RunReport& rep, bool include_tables = false) {
  json j;
  j["config"]["global"] = {{"seed", rep.global.seed},
                           {"threads", rep.global.threads},
                           {"quick", rep.global.quick},
                           {"out_dir", rep.global.out_dir},
                           {"format", rep.global.format}};
  json exps = json::array();
  for (const auto& e : rep.config) {
    json params = json::object();
    for (const auto& [k, v] : e.params.items()) params[k] = v;
    exps.push_back({{"kind", e.kind}, {"label", e.label}, {"params", params}});
  }
  j["config"]["experiments"] = exps;
  json results = json::array();
  for (const auto& r : rep.results) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    json jr{{"kind", r.kind},   {"label", r.label},       {"config_hash", r.hash},
            {"passed", r.passed()}, {"checks", checks}, {"measured", r.measured}};
    if (include_tables) {
      json tables = json::object();
      for (const auto& t : r.tables) tables[t.name] = table_json(t);
      jr["tables"] = tables;
    }
    jr["timing_seconds"] = r.seconds;
    results.push_back(jr);
  }
  j["results"] = results;
  j["passed"] = rep.passed();
  return j;
}

// One "name: true|false" line per check.
inline void print_summary(std::ostream& os, const RunReport& rep) {
  for (const auto& r : rep.results) {
    os << "[" << r.kind << "." << r.label << "]\n";
    for (const auto& c : r.checks) {
      os << "  " << c.name << ": " << (c.passed ? "true" : "false");
      if (!c.detail.empty()) os << "  (" << c.detail << ")";
      os << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Graph families shared by the diameter and spectra experiments

/// family: lps | cayley | random | cycle | complete | petersen | file, with params
/// "p,q" / "p[,st]" / "n,k" / "n" / "n" / "" / path.
inline Graph graph_from_family(const std::string& family, const std::string& params, std::uint64_t seed) {
  auto nums = [&](std::size_t want) {
    std::vector<std::int64_t> out;
    for (const auto& s : Params::split(params)) {
      if (s == "st") continue;
      try {
        out.push_back(std::stoll(s));
      } catch (const std::exception&) {
        throw InputError("graph params: expected integers, got '" + params + "'");
      }
    }
    if (out.size() != want)
      throw InputError("graph family " + family + " expects " + std::to_string(want) + " integer parameter(s)");
    return out;
  };
  if (family == "lps") {
    auto v = nums(2);
    return build_lps(v[0], v[1]);
  }
  if (family == "cayley") {
    auto v = nums(1);
    bool st = params.find("st") != std::string::npos;
    return build_cayley_sl2(v[0], st ? Sl2Family::st : Sl2Family::unipotent);
  }
  if (family == "random") {
    auto v = nums(2);
    if (v[0] < 1 || v[1] < 0) throw InputError("random graph: need n >= 1, k >= 0");
    return random_regular(static_cast<std::size_t>(v[0]), static_cast<int>(v[1]), seed);
  }
  if (family == "cycle") return cycle_graph(static_cast<std::size_t>(nums(1)[0]));
  if (family == "complete") return complete_graph(static_cast<std::size_t>(nums(1)[0]));
  if (family == "petersen") return petersen_graph();
  if (family == "file") {
    std::ifstream in(params);
    if (!in) throw InputError("cannot open graph file " + params);
    return read_edge_list(in, "file:" + params);
  }
  throw InputError("unknown graph family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

inline SubgroupSpec spec_from_params(const Params& p) {
  std::string group = p.str("group", "sl2");
  std::string kind = p.str("kind", "principal");
  auto level = p.integer("level", 1);
  Ambient a = group == "sl2" ? Ambient::sl2 : group == "sl3" ? Ambient::sl3 : throw InputError("group must be sl2 or sl3");
  SubgroupKind k = kind == "principal" ? SubgroupKind::principal
                   : kind == "gamma0"  ? SubgroupKind::gamma0
                   : kind == "gamma2"  ? SubgroupKind::gamma2
                                       : throw InputError("kind must be principal, gamma0 or gamma2");
  return SubgroupSpec::make(a, k, level);
}

inline std::optional<IntMatrix> conjugator_from_params(const Params& p, int n) {
  if (!p.has("conjugator")) return std::nullopt;
  auto entries = p.integers("conjugator");
  if (entries.size() != static_cast<std::size_t>(n * n))
    throw InputError("conjugator must list " + std::to_string(n * n) + " integers row by row");
  std::vector<Integer> v(entries.begin(), entries.end());
  return IntMatrix(n, v);
}

inline ExperimentResult run_count(const Params& p, const GlobalOptions& g) {
  ExperimentResult r;
  auto spec = spec_from_params(p);
  std::string method = p.str("method", "brute");
  auto conj = conjugator_from_params(p, spec.dim());
  bool by_norm = p.has("norm_bound");
  bool by_length = p.has("length_bound");
  if (by_norm == by_length) throw InputError("count: give exactly one of norm_bound or length_bound");

  CsvTable t{"count", {"bound", "count", "reference", "ratio"}, {}};
  if (by_norm) {
    auto bounds = p.integers("norm_bound");
    if (method != "brute" && method != "fast" && method != "both")
      throw InputError("count with norm_bound: method must be brute, fast or both");
    bool fast_ok = method != "brute";
    if (fast_ok && (spec.ambient != Ambient::sl2 || spec.kind != SubgroupKind::principal || conj))
      throw InputError("count: the fast method handles principal SL2 subgroups without a conjugator only");
    bool all_equal = true;
    for (auto T : bounds) {
      std::uint64_t count = 0;
      if (method == "fast") {
        count = count_sarnak_xue_fast(spec.level, T, g.threads).count;
      } else {
        count = count_bruteforce(spec, T, conj, g.threads).count;
        if (method == "both") all_equal &= count == count_sarnak_xue_fast(spec.level, T, g.threads).count;
      }
      auto ref = static_cast<double>(sl_n_lower_bound(spec.dim(), spec.level, T));
      t.add({std::to_string(T), std::to_string(count), fmt_double(ref), fmt_double(static_cast<double>(count) / ref)});
    }
    if (method == "both") r.checks.push_back({"fast == brute", all_equal, ""});
    r.measured["reference"] = "unipotent family count prod (2 floor(T/N) + 1)";
  } else {
    auto grid = p.reals("length_bound");
    std::string length = p.str("length", "cartan");
    LengthKind lk = length == "cartan"     ? LengthKind::cartan
                    : length == "log_norm" ? LengthKind::log_norm
                                           : throw InputError("length must be cartan or log_norm");
    if (method != "fixed-point" && method != "conjugator" && method != "both")
      throw InputError("count with length_bound: method must be fixed-point, conjugator or both");
    auto q = enumerate_quotient(spec);
    auto primary = radius_profile(
        q, grid, lk, method == "conjugator" ? ProfileMethod::conjugator_average : ProfileMethod::fixed_points);
    if (method == "both") {
      auto other = radius_profile(q, grid, lk, ProfileMethod::conjugator_average);
      bool same = true;
      for (std::size_t i = 0; i < primary.rows.size(); ++i) same &= primary.rows[i].total == other.rows[i].total;
      r.checks.push_back({"direct == fixed-point", same, ""});
    }
    for (const auto& row : primary.rows)
      t.add({fmt_double(row.d0), fmt_double(row.averaged), fmt_double(row.reference), fmt_double(row.ratio)});
    r.measured["index"] = q.index();
  }
  r.tables.push_back(std::move(t));
  p.finish("count");
  return r;
}

inline ExperimentResult run_lift(const Params& p, const GlobalOptions& g) {
  ExperimentResult r;
  auto level = p.integer("level");
  std::string kind = p.str("spec", "principal");
  auto spec = kind == "principal" ? SubgroupSpec::principal(level)
              : kind == "gamma0"  ? SubgroupSpec::gamma0(level)
                                  : throw InputError("lift: spec must be principal or gamma0");
  bool annulus = p.boolean("annulus", false);
  auto grid = p.integers("t_grid");
  auto targets = p.reals("targets", {0.5, 0.9, 0.99});
  auto q = enumerate_quotient(spec);
  CoverageCurve curve = grid.empty() && !annulus ? full_coverage_curve(q, 0, g.threads)
                                                 : coverage_curve(q, grid.empty() ? std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64} : grid,
                                                                  annulus, 0, g.threads);
  CsvTable t{"coverage", {"T", "ball_size", "covered", "fraction"}, {}};
  bool monotone = true;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& row = curve.rows[i];
    t.add({std::to_string(row.T), std::to_string(row.ball_size), std::to_string(row.covered), fmt_double(row.fraction)});
    if (i && row.fraction < curve.rows[i - 1].fraction) monotone = false;
  }
  if (!annulus) r.checks.push_back({"coverage monotone in T", monotone, ""});
  r.measured["index"] = q.index();
  json ks = json::array();
  for (double f : targets) {
    auto k = lifting_exponent(curve, f);
    json jk{{"target", f}, {"reached", k.reached}};
    if (k.reached) {
      jk["kappa"] = k.kappa;
      jk["kappa_low"] = k.kappa_low;
      jk["kappa_high"] = k.kappa_high;
      jk["crossing_T"] = k.crossing_T;
    }
    ks.push_back(jk);
  }
  r.measured["lifting_exponents"] = ks;
  r.tables.push_back(std::move(t));
  p.finish("lift");
  return r;
}

inline ExperimentResult run_diameter(const Params& p, const GlobalOptions& g) {
  ExperimentResult r;
  std::string family = p.str("family", "file");
  std::string params = family == "file" ? p.str("graph_file") : p.str("params", "");
  auto seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<std::int64_t>(g.seed)));
  auto eps = p.reals("eps", kDefaultEpsilonGrid);
  auto samples = static_cast<std::size_t>(p.integer("sample_sources", kExactDistanceVertexCap));
  auto graph = graph_from_family(family, params, seed);
  auto st = almost_diameter(graph, eps, seed, samples, kExactDistanceVertexCap, g.threads);
  CsvTable t{"histogram", {"distance", "pairs"}, {}};
  for (std::size_t d = 0; d < st.histogram.size(); ++d) t.add({std::to_string(d), std::to_string(st.histogram[d])});
  r.measured["graph"] = st.source;
  r.measured["vertices"] = st.vertices;
  r.measured["pairs"] = st.pairs;
  r.measured["mean"] = st.mean;
  r.measured["sampled"] = st.sampled;
  r.measured["sources"] = st.sources;
  r.measured["seed"] = st.seed;
  if (!st.within.empty()) {
    r.measured["log_q_n"] = st.log_q_n;
    json w = json::object();
    for (auto [e, f] : st.within) w[fmt_double(e)] = f;
    r.measured["fraction_within"] = w;
  }
  r.tables.push_back(std::move(t));
  p.finish("diameter");
  return r;
}

inline ExperimentResult run_tree(const Params& p, const GlobalOptions&) {
  ExperimentResult r;
  int q = static_cast<int>(p.integer("q"));
  int radius = static_cast<int>(p.integer("radius"));
  bool check = p.boolean("check_convolution", true);
  double slack = p.real("slack", kConvolutionConstant);
  TreeModel tree(q);
  if (radius < 0 || radius > kMaxTreeRadius) throw ResourceError("tree: radius must lie in [0, 12]");
  auto rep = check_convolution_lemma(q, radius, slack);
  CsvTable t{"convolution", {"d", "count", "bound", "ratio"}, {}};
  for (const auto& row : rep.rows)
    t.add({std::to_string(row.d), std::to_string(row.count), fmt_double(row.bound), fmt_double(row.ratio)});
  r.measured["ball_size"] = tree.ball_size(radius);
  r.measured["convolution_constant"] = rep.max_ratio;
  r.measured["recorded_constant"] = kConvolutionConstant;
  if (check) {
    std::string detail = "max ratio " + fmt_double(rep.max_ratio) + " vs slack " + fmt_double(slack);
    if (q == 1) detail += "; q = 1 is the degenerate line case";
    r.checks.push_back({"convolution within slack", rep.within_slack, detail});
  }
  r.tables.push_back(std::move(t));
  p.finish("tree");
  return r;
}

inline ExperimentResult run_spectra(const Params& p, const GlobalOptions& g) {
  ExperimentResult r;
  std::string family = p.str("family");
  std::string params = p.str("params", "");
  auto seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<std::int64_t>(g.seed)));
  bool nb = p.boolean("nb", false);
  bool profile = p.boolean("profile", false);
  auto p_grid = p.reals("p_grid", {2.25, 2.5, 3.0, 4.0, 6.0, 10.0, kInfinity});
  std::string nb_method = p.str("nb_method", "auto");
  auto graph = graph_from_family(family, params, seed);
  auto adj = adjacency_spectrum(graph);
  r.measured["graph"] = graph.provenance;
  r.measured["vertices"] = graph.vertex_count();
  r.measured["edges"] = graph.edge_count();
  r.measured["degree"] = graph.degree();
  r.measured["bipartite"] = adj.bipartite;

  CsvTable ta{"adjacency", {"index", "eigenvalue"}, {}};
  for (std::size_t i = 0; i < adj.real.size(); ++i) ta.add({std::to_string(i), fmt_double(adj.real[i])});
  r.tables.push_back(std::move(ta));

  std::optional<GraphSpectrum> nbs;
  if (nb) {
    NbMethod m = nb_method == "auto"     ? NbMethod::automatic
                 : nb_method == "ihara"  ? NbMethod::ihara
                 : nb_method == "direct" ? NbMethod::direct
                                         : throw InputError("nb_method must be auto, ihara or direct");
    nbs = nonbacktracking_spectrum(graph, m, &adj);
    CsvTable tb{"nonbacktracking", {"index", "real", "imag", "modulus"}, {}};
    for (std::size_t i = 0; i < nbs->complex.size(); ++i)
      tb.add({std::to_string(i), fmt_double(nbs->complex[i].real()), fmt_double(nbs->complex[i].imag()),
              fmt_double(std::abs(nbs->complex[i]))});
    r.tables.push_back(std::move(tb));
    if (graph.degree() >= 3) {
      auto rr = ramanujan_report(adj, *nbs);
      r.measured["max_nontrivial_adjacency"] = rr.max_nontrivial_adjacency;
      r.measured["max_nontrivial_nonbacktracking"] = rr.max_nontrivial_nb;
      r.checks.push_back({"adjacency and non-backtracking Ramanujan tests agree",
                          rr.adjacency_ramanujan == rr.nb_ramanujan,
                          std::string("adjacency ") + (rr.adjacency_ramanujan ? "Ramanujan" : "not Ramanujan")});
    }
  }
  if (profile) {
    auto prof = density_profile(adj, p_grid);
    CsvTable tp{"profile", {"p", "M", "bound"}, {}};
    bool nonincreasing = true;
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      const auto& row = prof.rows[i];
      tp.add({fmt_double(row.p), std::to_string(row.M), fmt_double(row.bound)});
      if (i && row.M > prof.rows[i - 1].M) nonincreasing = false;
    }
    r.checks.push_back({"M(p) nonincreasing", nonincreasing, ""});
    if (nbs) {
      std::vector<double> open_grid;
      for (double x : p_grid)
        if (x > 2.0) open_grid.push_back(x);
      if (!open_grid.empty()) {
        auto a = density_profile(adj, open_grid), b = density_profile_nb(*nbs, open_grid);
        bool same = true;
        for (std::size_t i = 0; i < a.rows.size(); ++i) same &= a.rows[i].M == b.rows[i].M;
        r.checks.push_back({"M(p) adjacency == M(p) non-backtracking", same, ""});
      }
    }
    r.tables.push_back(std::move(tp));
  }
  p.finish("spectra");
  return r;
}

inline ExperimentResult run_xi(const Params& p, const GlobalOptions& g) {
  ExperimentResult r;
  auto ts = p.reals("t", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  double pv = p.real("p", 2.0);
  auto samples = static_cast<std::size_t>(p.integer("samples", g.quick ? 100000 : 1000000));
  auto seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<std::int64_t>(g.seed)));
  CsvTable t{"xi", {"t", "p", "estimate", "std_error", "upper_bound", "lower_bound"}, {}};
  bool inside = true;
  for (double tv : ts) {
    auto est = xi_p_montecarlo(sl2_translation(tv), pv, samples, seed, g.threads);
    // |ln delta(a_t k)| <= t pointwise, so e^{-t/p} bounds from below for every p. The
    // polynomial upper envelope is the p = 2 statement and is only checked there.
    double lo = std::exp(-tv / pv), hi = 2.0 * (1.0 + tv) * std::exp(-tv / pv);
    inside &= est.estimate >= lo - 3 * est.std_error;
    if (pv == 2.0) inside &= est.estimate <= hi + 3 * est.std_error;
    t.add({fmt_double(tv), fmt_double(pv), fmt_double(est.estimate), fmt_double(est.std_error), fmt_double(hi),
           fmt_double(lo)});
  }
  r.checks.push_back({"estimates within envelope", inside, ""});
  r.measured["samples"] = samples;
  r.tables.push_back(std::move(t));
  p.finish("xi");
  return r;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& e, const GlobalOptions& g) {
  auto start = std::chrono::steady_clock::now();
  ExperimentResult r;
  try {
    if (e.kind == "count") r = detail::run_count(e.params, g);
    else if (e.kind == "lift") r = detail::run_lift(e.params, g);
    else if (e.kind == "diameter") r = detail::run_diameter(e.params, g);
    else if (e.kind == "tree") r = detail::run_tree(e.params, g);
    else if (e.kind == "spectra") r = detail::run_spectra(e.params, g);
    else if (e.kind == "xi") r = detail::run_xi(e.params, g);
    else throw InputError("unknown experiment kind '" + e.kind + "'");
  } catch (const Error& err) {
    // Same dynamic type, message prefixed with the stage.
    std::string msg = "[" + e.kind + "." + e.label + "] " + err.what();
    if (dynamic_cast<const DomainError*>(&err)) throw DomainError(msg);
    if (dynamic_cast<const InputError*>(&err)) throw InputError(msg);
    if (dynamic_cast<const ResourceError*>(&err)) throw ResourceError(msg);
    if (dynamic_cast<const NumericalError*>(&err)) throw NumericalError(msg);
    throw Error(err.code(), msg);
  }
  r.kind = e.kind;
  r.label = e.label;
  r.hash = config_hash(e, g);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline void write_outputs(const RunReport& rep) {
  if (rep.global.out_dir.empty()) return;
  std::filesystem::create_directories(rep.global.out_dir);
  for (const auto& r : rep.results)
    for (const auto& t : r.tables) {
      auto path = std::filesystem::path(rep.global.out_dir) / (r.kind + "." + r.label + "." + t.name + ".csv");
      std::ofstream os(path);
      if (!os) throw InputError("cannot write " + path.string());
      write_csv(os, t, r.hash, rep.global.seed);
    }
  std::ofstream os(std::filesystem::path(rep.global.out_dir) / "report.json");
  os << report_json(rep, rep.global.format == "json").dump(2) << '\n';
}

/// Runs every configured experiment in declared order and writes outputs.
inline RunReport run(const RunConfig& cfg) {
  RunReport rep{cfg.global, cfg.experiments, {}};
  for (const auto& e : cfg.experiments) rep.results.push_back(run_experiment(e, cfg.global));
  write_outputs(rep);
  return rep;
}

}  // namespace latlab

#endif
