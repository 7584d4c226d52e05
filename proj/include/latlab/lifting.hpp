#ifndef LATLAB_LIFTING_HPP
#define LATLAB_LIFTING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "latlab/counting.hpp"
#include "latlab/errors.hpp"
#include "latlab/graph.hpp"
#include "latlab/matgroups.hpp"
#include "latlab/parallel.hpp"

namespace latlab {

inline constexpr std::int64_t kCoverageMaxT = 4096;

struct CoverageRow {
  std::int64_t T = 0;
  std::uint64_t ball_size = 0;  // #{gamma : |gamma|_inf <= T}, or the annulus T/2 < |gamma| <= T
  std::uint64_t covered = 0;
  double fraction = 0.0;
};

struct CoverageCurve {
  SubgroupSpec spec;
  std::size_t index = 0;
  std::uint32_t start = 0;  // source coset x; covered cosets are x * gamma
  bool annulus = false;
  std::vector<CoverageRow> rows;
};

/// For each coset c, the smallest sup-norm of a gamma in SL2(Z) with start * gamma = c,
/// together with the number of SL2(Z) elements of each sup-norm up to the largest of
/// these. Boxes double until every coset is hit.
struct FirstHits {
  std::vector<std::int64_t> norm;       // per coset
  std::vector<std::uint64_t> by_norm;   // by_norm[t] = #{gamma : |gamma|_inf = t}
  std::int64_t saturation = 0;          // max over cosets of norm
};

namespace detail {

// Sup-norm histogram and per-coset minimum norm over the box of half-width T.
inline void scan_box(const QuotientSpace& quotient, std::uint32_t start, std::int64_t T, unsigned threads,
                     std::vector<std::int64_t>& norm, std::vector<std::uint64_t>& by_norm) {
  const std::size_t width = static_cast<std::size_t>(2 * T + 1);
  const std::size_t chunks = std::min<std::size_t>(width, 64);
  std::vector<std::vector<std::int64_t>> part_norm(chunks);
  std::vector<std::vector<std::uint64_t>> part_hist(chunks);
  const auto none = std::numeric_limits<std::int64_t>::max();
  parallel_chunks(width, chunks, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& pn = part_norm[c];
    auto& ph = part_hist[c];
    pn.assign(quotient.index(), none);
    ph.assign(static_cast<std::size_t>(T) + 1, 0);
    const auto lo = static_cast<std::int64_t>(begin) - T, hi = static_cast<std::int64_t>(end) - 1 - T;
    for_each_sl2_in_rows(T, lo, hi, [&](const Sl2& g) {
      auto m = g.max_abs();
      ++ph[static_cast<std::size_t>(m)];
      auto x = quotient.act(start, g.to_int_matrix());
      pn[x] = std::min(pn[x], m);
    });
  });
  norm.assign(quotient.index(), none);
  by_norm.assign(static_cast<std::size_t>(T) + 1, 0);
  for (std::size_t c = 0; c < chunks; ++c) {
    if (part_norm[c].empty()) continue;
    for (std::size_t i = 0; i < norm.size(); ++i) norm[i] = std::min(norm[i], part_norm[c][i]);
    for (std::size_t t = 0; t < by_norm.size(); ++t) by_norm[t] += part_hist[c][t];
  }
}

}  // namespace detail

inline FirstHits first_hits(const QuotientSpace& quotient, std::uint32_t start = 0, std::int64_t max_T = kCoverageMaxT,
                            unsigned threads = default_threads()) {
  if (quotient.spec().ambient != Ambient::sl2) throw InputError("coverage: SL2 quotients only");
  if (start >= quotient.index()) throw InputError("coverage: start coset out of range");
  for (std::int64_t T = 8;; T = std::min(2 * T, max_T)) {
    FirstHits fh;
    detail::scan_box(quotient, start, T, threads, fh.norm, fh.by_norm);
    auto worst = *std::max_element(fh.norm.begin(), fh.norm.end());
    if (worst <= T) {
      fh.saturation = worst;
      return fh;
    }
    if (T >= max_T)
      throw ResourceError("coverage: some coset is not reached with entries <= " + std::to_string(max_T));
  }
}

/// Coverage of the quotient by start * gamma over the norm ball |gamma|_inf <= T (or
/// the annulus T/2 < |gamma|_inf <= T) for every T in the grid.
inline CoverageCurve coverage_curve(const QuotientSpace& quotient, std::vector<std::int64_t> grid, bool annulus = false,
                                    std::uint32_t start = 0, unsigned threads = default_threads()) {
  if (grid.empty()) throw InputError("coverage_curve: empty T grid");
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 1)
    throw InputError("coverage_curve: T grid must be ascending and >= 1");
  if (grid.back() > kCoverageMaxT) throw ResourceError("coverage_curve: T above " + std::to_string(kCoverageMaxT));
  if (quotient.spec().ambient != Ambient::sl2) throw InputError("coverage_curve: SL2 quotients only");
  CoverageCurve out{quotient.spec(), quotient.index(), start, annulus, {}};
  const double index = static_cast<double>(quotient.index());

  if (!annulus) {
    std::vector<std::int64_t> norm;
    std::vector<std::uint64_t> hist;
    detail::scan_box(quotient, start, grid.back(), threads, norm, hist);
    std::sort(norm.begin(), norm.end());
    std::uint64_t ball = 0;
    std::size_t t = 0;
    for (auto T : grid) {
      for (; t <= static_cast<std::size_t>(T); ++t) ball += hist[t];
      auto covered = static_cast<std::uint64_t>(std::upper_bound(norm.begin(), norm.end(), T) - norm.begin());
      out.rows.push_back({T, ball, covered, static_cast<double>(covered) / index});
    }
    return out;
  }

  // Annulus rows are not nested, so each grid point keeps its own hit set.
  const std::int64_t T = grid.back();
  std::vector<std::vector<char>> hit(grid.size(), std::vector<char>(quotient.index(), 0));
  std::vector<std::uint64_t> sizes(grid.size(), 0);
  for_each_sl2_in_box(T, [&](const Sl2& g) {
    auto m = g.max_abs();
    std::optional<std::uint32_t> x;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(2 * m > grid[i] && m <= grid[i])) continue;
      if (!x) x = quotient.act(start, g.to_int_matrix());
      hit[i][*x] = 1;
      ++sizes[i];
    }
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto covered = static_cast<std::uint64_t>(std::count(hit[i].begin(), hit[i].end(), 1));
    out.rows.push_back({grid[i], sizes[i], covered, static_cast<double>(covered) / index});
  }
  return out;
}

/// Every integer T from 1 up to full coverage.
inline CoverageCurve full_coverage_curve(const QuotientSpace& quotient, std::uint32_t start = 0,
                                         unsigned threads = default_threads()) {
  auto fh = first_hits(quotient, start, kCoverageMaxT, threads);
  CoverageCurve out{quotient.spec(), quotient.index(), start, false, {}};
  auto norms = fh.norm;
  std::sort(norms.begin(), norms.end());
  std::uint64_t ball = fh.by_norm[0];
  for (std::int64_t T = 1; T <= fh.saturation; ++T) {
    ball += fh.by_norm[static_cast<std::size_t>(T)];
    auto covered = static_cast<std::uint64_t>(std::upper_bound(norms.begin(), norms.end(), T) - norms.begin());
    out.rows.push_back({T, ball, covered, static_cast<double>(covered) / static_cast<double>(quotient.index())});
  }
  return out;
}

struct LiftingExponent {
  double target = 0.0;
  bool reached = false;
  double kappa = std::numeric_limits<double>::quiet_NaN();  // 2 ln T / ln index at the crossing
  double kappa_low = kappa, kappa_high = kappa;              // neighbouring grid points
  double crossing_T = kappa;
};

/// Crossing exponent of the coverage curve at fraction f, interpolated linearly in
/// ln T between the bracketing grid points.
inline LiftingExponent lifting_exponent(const CoverageCurve& curve, double f) {
  if (!(f > 0.0 && f <= 1.0)) throw InputError("lifting_exponent: target fraction must lie in (0, 1]");
  if (curve.index < 2) throw InputError("lifting_exponent: index must be >= 2");
  LiftingExponent out;
  out.target = f;
  const double lnidx = std::log(static_cast<double>(curve.index));
  auto kappa_of = [&](double T) { return 2.0 * std::log(T) / lnidx; };
  const double eps = 1e-12;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& r = curve.rows[i];
    if (r.fraction + eps < f) continue;
    out.reached = true;
    double hi = static_cast<double>(r.T);
    if (i == 0) {
      out.crossing_T = hi;
      out.kappa = out.kappa_high = kappa_of(hi);
      out.kappa_low = 0.0;
      return out;
    }
    const auto& prev = curve.rows[i - 1];
    double lo = static_cast<double>(prev.T);
    double w = (f - prev.fraction) / (r.fraction - prev.fraction);
    double lnT = std::log(lo) + w * (std::log(hi) - std::log(lo));
    out.crossing_T = std::exp(lnT);
    out.kappa = 2.0 * lnT / lnidx;
    out.kappa_low = kappa_of(lo);
    out.kappa_high = kappa_of(hi);
    return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Almost-diameter statistics

inline const std::vector<double> kDefaultEpsilonGrid{0.1, 0.25, 0.5};
inline constexpr std::size_t kExactDistanceVertexCap = 5000;
inline constexpr std::size_t kDistanceVertexCap = 100000;

struct DistanceStats {
  std::string source;
  std::size_t vertices = 0;
  int q = 0;                         // degree - 1; 0 when not regular
  std::vector<std::uint64_t> histogram;  // histogram[d] = #ordered pairs (x != y) at distance d
  std::uint64_t pairs = 0;
  double mean = 0.0;
  bool sampled = false;
  std::size_t sources = 0;
  std::uint64_t seed = 0;
  double log_q_n = std::numeric_limits<double>::quiet_NaN();
  std::map<double, double> within;  // eps -> fraction with d <= (1 + eps) log_q n; empty when q <= 1
};

/// Distance distribution over ordered pairs of distinct vertices. Graphs with more
/// than `exact_cap` vertices use `sample_sources` BFS sources drawn without
/// replacement from the seeded generator.
inline DistanceStats almost_diameter(const Graph& g, const std::vector<double>& eps_grid = kDefaultEpsilonGrid,
                                     std::uint64_t seed = 0, std::size_t sample_sources = kExactDistanceVertexCap,
                                     std::size_t exact_cap = kExactDistanceVertexCap,
                                     unsigned threads = default_threads()) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw InputError("almost_diameter: need at least two vertices");
  if (n > kDistanceVertexCap) throw ResourceError("almost_diameter: more than 100000 vertices");
  DistanceStats st;
  st.source = g.provenance;
  st.vertices = n;
  st.seed = seed;
  int k = g.degree();
  st.q = k >= 1 ? k - 1 : 0;

  std::vector<std::uint32_t> sources(n);
  for (std::uint32_t v = 0; v < n; ++v) sources[v] = v;
  if (n > exact_cap && sample_sources < n) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < sample_sources; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(sources[i], sources[pick(rng)]);
    }
    sources.resize(sample_sources);
    std::sort(sources.begin(), sources.end());
    st.sampled = true;
  }
  st.sources = sources.size();

  const std::size_t chunks = std::min<std::size_t>(sources.size(), 64);
  std::vector<std::vector<std::uint64_t>> parts(chunks);
  std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> separated(chunks);
  parallel_chunks(sources.size(), chunks, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& h = parts[c];
    for (std::size_t i = begin; i < end; ++i) {
      auto dist = g.distances_from(sources[i]);
      for (std::uint32_t v = 0; v < n; ++v) {
        if (v == sources[i]) continue;
        if (dist[v] < 0) {
          if (!separated[c]) separated[c] = std::pair{sources[i], v};
          continue;
        }
        if (h.size() <= static_cast<std::size_t>(dist[v])) h.resize(static_cast<std::size_t>(dist[v]) + 1, 0);
        ++h[static_cast<std::size_t>(dist[v])];
      }
    }
  });
  for (std::size_t c = 0; c < chunks; ++c) {
    if (separated[c])
      throw InputError("almost_diameter: graph is disconnected (no path from " + std::to_string(separated[c]->first) +
                       " to " + std::to_string(separated[c]->second) + ")");
    if (st.histogram.size() < parts[c].size()) st.histogram.resize(parts[c].size(), 0);
    for (std::size_t d = 0; d < parts[c].size(); ++d) st.histogram[d] += parts[c][d];
  }

  double total = 0.0;
  for (std::size_t d = 0; d < st.histogram.size(); ++d) {
    st.pairs += st.histogram[d];
    total += static_cast<double>(d) * static_cast<double>(st.histogram[d]);
  }
  st.mean = total / static_cast<double>(st.pairs);

  if (st.q >= 2) {
    st.log_q_n = std::log(static_cast<double>(n)) / std::log(static_cast<double>(st.q));
    for (double eps : eps_grid) {
      double bound = (1.0 + eps) * st.log_q_n;
      std::uint64_t inside = 0;
      for (std::size_t d = 0; d < st.histogram.size() && static_cast<double>(d) <= bound + 1e-12; ++d)
        inside += st.histogram[d];
      st.within[eps] = static_cast<double>(inside) / static_cast<double>(st.pairs);
    }
  }
  return st;
}

}  // namespace latlab

#endif
