#ifndef LATLAB_SPECTRAL_HPP
#define LATLAB_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "latlab/errors.hpp"
#include "latlab/graph.hpp"
#include "latlab/trees.hpp"

namespace latlab {

using cplx = std::complex<double>;

inline constexpr std::size_t kDenseAdjacencyCap = 5000;
inline constexpr std::size_t kDenseNonBacktrackingCap = 8000;  // directed edges
inline constexpr double kTrivialTol = 1e-8;

enum class SpectralOperator { adjacency, non_backtracking };

/// Eigenvalues of one graph operator, listed with multiplicity.
struct GraphSpectrum {
  SpectralOperator op = SpectralOperator::adjacency;
  std::vector<double> real;     // adjacency: sorted descending
  std::vector<cplx> complex;    // non-backtracking: sorted by modulus descending
  int degree = -1;              // -1 for non-regular graphs
  std::size_t vertices = 0;
  std::size_t edges = 0;
  bool bipartite = false;
};

inline Eigen::MatrixXd adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t v = 0; v < g.adj.size(); ++v)
    for (auto u : g.adj[v]) a(v, u) += 1.0;
  return a;
}

inline GraphSpectrum make_spectrum_shell(const Graph& g, SpectralOperator op) {
  GraphSpectrum s;
  s.op = op;
  s.degree = g.degree();
  s.vertices = g.vertex_count();
  s.edges = g.edge_count();
  s.bipartite = g.bipartite();
  return s;
}

inline GraphSpectrum adjacency_spectrum(const Graph& g) {
  if (g.vertex_count() > kDenseAdjacencyCap)
    throw ResourceError("adjacency_spectrum: " + std::to_string(g.vertex_count()) + " vertices above the dense cap");
  auto s = make_spectrum_shell(g, SpectralOperator::adjacency);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency_matrix(g), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("adjacency_spectrum: eigensolver failed");
  s.real.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(s.real.begin(), s.real.end(), std::greater<>());
  return s;
}

struct AdjacencyEigensystem {
  Eigen::VectorXd values;   // ascending (solver order)
  Eigen::MatrixXd vectors;  // columns
};

inline AdjacencyEigensystem adjacency_eigensystem(const Graph& g) {
  if (g.vertex_count() > kDenseAdjacencyCap) throw ResourceError("adjacency_eigensystem: above the dense cap");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency_matrix(g));
  if (es.info() != Eigen::Success) throw NumericalError("adjacency_eigensystem: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// ---------------------------------------------------------------------------
// Non-backtracking (Hashimoto) operator on directed edges

/// Directed edges (u -> v) indexed by (u, slot in adj[u]), with reverse-edge lookup.
struct DirectedEdges {
  std::vector<std::uint32_t> tail, head;
  std::vector<std::size_t> offset;   // first directed edge out of each vertex
  std::vector<std::size_t> reverse;  // index of (v -> u)

  explicit DirectedEdges(const Graph& g) {
    if (!g.simple()) throw InputError("non-backtracking operator requires a simple graph");
    offset.resize(g.vertex_count() + 1, 0);
    for (std::uint32_t u = 0; u < g.adj.size(); ++u) {
      offset[u + 1] = offset[u] + g.adj[u].size();
      for (auto v : g.adj[u]) {
        tail.push_back(u);
        head.push_back(v);
      }
    }
    reverse.resize(tail.size());
    for (std::size_t e = 0; e < tail.size(); ++e) {
      auto v = head[e];
      const auto& nb = g.adj[v];
      auto it = std::find(nb.begin(), nb.end(), tail[e]);
      reverse[e] = offset[v] + static_cast<std::size_t>(it - nb.begin());
    }
  }

  std::size_t size() const { return tail.size(); }
};

// B[(u->v), (v->w)] = 1 for w != u.
inline Eigen::MatrixXd nonbacktracking_matrix(const Graph& g) {
  DirectedEdges de(g);
  const auto m = static_cast<Eigen::Index>(de.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t e = 0; e < de.size(); ++e) {
    auto v = de.head[e];
    for (std::size_t f = de.offset[v]; f < de.offset[v + 1]; ++f)
      if (de.head[f] != de.tail[e]) b(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f)) = 1.0;
  }
  return b;
}

// y = B x without forming B.
inline std::vector<cplx> apply_nonbacktracking(const Graph& g, const DirectedEdges& de, const std::vector<cplx>& x) {
  std::vector<cplx> out_sum(g.vertex_count(), 0.0);
  for (std::size_t f = 0; f < de.size(); ++f) out_sum[de.tail[f]] += x[f];
  std::vector<cplx> y(de.size());
  for (std::size_t e = 0; e < de.size(); ++e) y[e] = out_sum[de.head[e]] - x[de.reverse[e]];
  return y;
}

inline void sort_by_modulus(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

/// Dense eigensolve of B on the 2|E| directed edges.
inline GraphSpectrum nonbacktracking_spectrum_direct(const Graph& g) {
  if (2 * g.edge_count() > kDenseNonBacktrackingCap)
    throw ResourceError("nonbacktracking_spectrum: 2|E| above the dense cap");
  auto s = make_spectrum_shell(g, SpectralOperator::non_backtracking);
  Eigen::EigenSolver<Eigen::MatrixXd> es(nonbacktracking_matrix(g), false);
  if (es.info() != Eigen::Success) throw NumericalError("nonbacktracking_spectrum: eigensolver failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s.complex.push_back(es.eigenvalues()[i]);
  sort_by_modulus(s.complex);
  return s;
}

// Roots of mu^2 - lambda mu + q = 0, larger modulus first.
inline std::pair<cplx, cplx> ihara_roots(double lambda, int q) {
  cplx disc = std::sqrt(cplx(lambda * lambda - 4.0 * q, 0.0));
  cplx r1 = (lambda + disc) / 2.0, r2 = (lambda - disc) / 2.0;
  if (std::abs(r2) > std::abs(r1)) std::swap(r1, r2);
  return {r1, r2};
}

/// Non-backtracking spectrum of a connected-or-not (q+1)-regular simple graph from
/// its adjacency spectrum: each lambda contributes the two roots of
/// mu^2 - lambda mu + q, and +1, -1 each appear |E| - |V| more times.
inline GraphSpectrum nonbacktracking_spectrum_ihara(const Graph& g, const GraphSpectrum& adjacency) {
  if (adjacency.op != SpectralOperator::adjacency) throw InputError("expected an adjacency spectrum");
  int k = g.degree();
  if (k < 1) throw InputError("nonbacktracking_spectrum_ihara: graph must be regular of degree >= 1");
  if (!g.simple()) throw InputError("nonbacktracking_spectrum_ihara: graph must be simple");
  const int q = k - 1;
  auto s = make_spectrum_shell(g, SpectralOperator::non_backtracking);
  for (double lambda : adjacency.real) {
    auto [r1, r2] = ihara_roots(lambda, q);
    s.complex.push_back(r1);
    s.complex.push_back(r2);
  }
  const auto extra = static_cast<std::int64_t>(g.edge_count()) - static_cast<std::int64_t>(g.vertex_count());
  for (std::int64_t i = 0; i < extra; ++i) {
    s.complex.emplace_back(1.0, 0.0);
    s.complex.emplace_back(-1.0, 0.0);
  }
  sort_by_modulus(s.complex);
  return s;
}

enum class NbMethod { automatic, ihara, direct };

inline GraphSpectrum nonbacktracking_spectrum(const Graph& g, NbMethod method = NbMethod::automatic,
                                              const GraphSpectrum* adjacency = nullptr) {
  if (method == NbMethod::direct || (method == NbMethod::automatic && !g.regular()))
    return nonbacktracking_spectrum_direct(g);
  if (adjacency) return nonbacktracking_spectrum_ihara(g, *adjacency);
  return nonbacktracking_spectrum_ihara(g, adjacency_spectrum(g));
}

/// Constructs the B-eigenvector xi(u->v) = mu f(v) - f(u) from every adjacency
/// eigenpair (lambda, f) and each Ihara root mu, and returns the largest relative
/// residual |B xi - mu xi| / |xi|. Certifies the Ihara-derived spectrum against the
/// operator itself without a dense solve on the directed-edge space.
inline double ihara_eigenvector_residual(const Graph& g, const AdjacencyEigensystem& sys) {
  int k = g.degree();
  if (k < 1) throw InputError("ihara_eigenvector_residual: graph must be regular");
  const int q = k - 1;
  DirectedEdges de(g);
  double worst = 0.0;
  std::vector<cplx> xi(de.size());
  for (Eigen::Index j = 0; j < sys.values.size(); ++j) {
    auto [r1, r2] = ihara_roots(sys.values[j], q);
    for (cplx mu : {r1, r2}) {
      double norm = 0.0;
      for (std::size_t e = 0; e < de.size(); ++e) {
        xi[e] = mu * sys.vectors(de.head[e], j) - sys.vectors(de.tail[e], j);
        norm += std::norm(xi[e]);
      }
      norm = std::sqrt(norm);
      if (norm < 1e-12) continue;  // mu f(v) = f(u) on every edge: no eigenvector from this pair
      auto bx = apply_nonbacktracking(g, de, xi);
      double res = 0.0;
      for (std::size_t e = 0; e < de.size(); ++e) res += std::norm(bx[e] - mu * xi[e]);
      worst = std::max(worst, std::sqrt(res) / norm);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Ihara-Bass determinant identity

struct IharaBassRow {
  double u = 0.0;
  double log_lhs = 0.0;  // log det(I - u B)
  double log_rhs = 0.0;  // (|E|-|V|) log(1-u^2) + log det(I - u A + q u^2 I)
  double rel_error = 0.0;
};

inline double log_abs_det(const Eigen::MatrixXd& m, int& sign) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const auto& f = lu.matrixLU();
  double logdet = 0.0;
  sign = lu.permutationP().determinant() > 0 ? 1 : -1;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    double d = f(i, i);
    if (d == 0.0) {
      sign = 0;
      return -std::numeric_limits<double>::infinity();
    }
    if (d < 0) sign = -sign;
    logdet += std::log(std::abs(d));
  }
  return logdet;
}

/// Evaluates both sides of det(I - uB) = (1 - u^2)^{|E|-|V|} det(I - uA + q u^2 I)
/// independently (dense LU on each side) at `count` random u in (0, 1/q).
inline std::vector<IharaBassRow> ihara_bass_check(const Graph& g, int count, std::uint64_t seed) {
  int k = g.degree();
  if (k < 2) throw InputError("ihara_bass_check: graph must be regular of degree >= 2");
  const int q = k - 1;
  Eigen::MatrixXd b = nonbacktracking_matrix(g);
  Eigen::MatrixXd a = adjacency_matrix(g);
  const auto m = b.rows(), n = a.rows();
  const double excess = static_cast<double>(g.edge_count()) - static_cast<double>(g.vertex_count());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<IharaBassRow> rows;
  for (int i = 0; i < count; ++i) {
    double u = unif(rng) / q;
    if (u <= 0.0) u = 0.5 / q;
    int s1 = 0, s2 = 0;
    double lhs = log_abs_det(Eigen::MatrixXd::Identity(m, m) - u * b, s1);
    double rhs = excess * std::log(1.0 - u * u) +
                 log_abs_det(Eigen::MatrixXd::Identity(n, n) * (1.0 + q * u * u) - u * a, s2);
    double rel = s1 == s2 ? std::abs(std::expm1(lhs - rhs)) : std::numeric_limits<double>::infinity();
    rows.push_back({u, lhs, rhs, rel});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Ramanujan certification and density profiles

inline bool is_trivial_adjacency(double lambda, int q) { return std::abs(lambda) >= q + 1.0 - kTrivialTol; }
inline bool is_trivial_nb(cplx mu, int q) { return std::abs(mu) >= q - kTrivialTol; }

struct RamanujanReport {
  int q = 0;
  double max_nontrivial_adjacency = 0.0;  // max |lambda| over nontrivial eigenvalues
  double max_nontrivial_nb = 0.0;         // max |mu| over nontrivial eigenvalues
  bool adjacency_ramanujan = false;       // <= 2 sqrt(q) + tol
  bool nb_ramanujan = false;              // <= sqrt(q) + tol
  double worst_p_mismatch = 0.0;          // max | |mu| - q^{1-1/p(lambda)} | over non-tempered lambda
};

inline RamanujanReport ramanujan_report(const GraphSpectrum& adjacency, const GraphSpectrum& nb, double tol = 1e-6) {
  if (adjacency.degree < 2) throw InputError("ramanujan_report: need a regular graph of degree >= 2");
  const int q = adjacency.degree - 1;
  RamanujanReport r;
  r.q = q;
  for (double l : adjacency.real)
    if (!is_trivial_adjacency(l, q)) r.max_nontrivial_adjacency = std::max(r.max_nontrivial_adjacency, std::abs(l));
  for (cplx m : nb.complex)
    if (!is_trivial_nb(m, q)) r.max_nontrivial_nb = std::max(r.max_nontrivial_nb, std::abs(m));
  r.adjacency_ramanujan = r.max_nontrivial_adjacency <= 2.0 * std::sqrt(q) + tol;
  r.nb_ramanujan = r.max_nontrivial_nb <= std::sqrt(static_cast<double>(q)) + tol;
  for (double l : adjacency.real) {
    if (is_trivial_adjacency(l, q) || std::abs(l) <= 2.0 * std::sqrt(q)) continue;
    double p = eigen_to_p(l, q);
    double expected = std::pow(static_cast<double>(q), 1.0 - 1.0 / p);
    auto [r1, r2] = ihara_roots(l, q);
    r.worst_p_mismatch = std::max(r.worst_p_mismatch, std::abs(std::abs(r1) - expected));
  }
  return r;
}

struct DensityRow {
  double p = 0.0;
  std::uint64_t M = 0;   // nontrivial eigenvalues with p(lambda) >= p, with multiplicity
  double bound = 0.0;    // n^{2/p}
};

struct DensityProfile {
  int q = 0;
  std::size_t n = 0;
  std::vector<DensityRow> rows;
};

/// M(p) = #{nontrivial lambda : eigen_to_p(|lambda|, q) >= p}; trivial means |lambda| = q + 1.
inline DensityProfile density_profile(const GraphSpectrum& adjacency, const std::vector<double>& p_grid) {
  if (adjacency.op != SpectralOperator::adjacency) throw InputError("density_profile: expected an adjacency spectrum");
  if (adjacency.degree < 3) throw InputError("density_profile: graph must be (q+1)-regular with q >= 2");
  const int q = adjacency.degree - 1;
  std::vector<double> ps;
  for (double l : adjacency.real)
    if (!is_trivial_adjacency(l, q)) ps.push_back(eigen_to_p(l, q));
  DensityProfile out{q, adjacency.vertices, {}};
  for (double p : p_grid) {
    if (!(p >= 2.0)) throw InputError("density_profile: p grid must lie in [2, inf]");
    std::uint64_t m = 0;
    for (double pl : ps) m += pl >= p;
    out.rows.push_back({p, m, std::pow(static_cast<double>(adjacency.vertices), 2.0 / p)});
  }
  return out;
}

/// The same profile read off the non-backtracking spectrum: each non-tempered lambda
/// owns exactly one mu with sqrt(q) < |mu| < q, and |mu| = q^{1 - 1/p}. Defined for p > 2.
inline DensityProfile density_profile_nb(const GraphSpectrum& nb, const std::vector<double>& p_grid) {
  if (nb.op != SpectralOperator::non_backtracking) throw InputError("density_profile_nb: expected a B spectrum");
  if (nb.degree < 3) throw InputError("density_profile_nb: graph must be (q+1)-regular with q >= 2");
  const int q = nb.degree - 1;
  const double root = std::sqrt(static_cast<double>(q));
  std::vector<double> ps;
  for (cplx m : nb.complex) {
    double mod = std::abs(m);
    if (is_trivial_nb(m, q) || mod <= root + 1e-9) continue;
    ps.push_back(nb_modulus_to_p(mod, q));
  }
  DensityProfile out{q, nb.vertices, {}};
  for (double p : p_grid) {
    if (!(p > 2.0)) throw InputError("density_profile_nb: p grid must lie in (2, inf]");
    std::uint64_t m = 0;
    for (double pl : ps) m += pl >= p;
    out.rows.push_back({p, m, std::pow(static_cast<double>(nb.vertices), 2.0 / p)});
  }
  return out;
}

/// Least-squares alpha in log M(p) = c_p + (1 - alpha (1 - 2/p)) log n over a family
/// of at least three graphs of increasing size. Grid points with M = 0 on some graph
/// are dropped; returns nullopt when nothing identifiable remains.
inline std::optional<double> fit_density_alpha(const std::vector<DensityProfile>& family) {
  if (family.size() < 3) return std::nullopt;
  for (std::size_t i = 1; i < family.size(); ++i)
    if (family[i].n <= family[i - 1].n) return std::nullopt;
  double sxy = 0.0, sxx = 0.0;
  const auto& grid = family.front().rows;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    double p = grid[r].p;
    double w = std::isinf(p) ? 1.0 : 1.0 - 2.0 / p;
    if (w <= 0.0) continue;
    std::vector<double> xs, ys;
    bool usable = true;
    for (const auto& prof : family) {
      if (prof.rows.size() != grid.size() || prof.rows[r].M == 0) {
        usable = false;
        break;
      }
      double ln = std::log(static_cast<double>(prof.n));
      xs.push_back(-w * ln);
      ys.push_back(std::log(static_cast<double>(prof.rows[r].M)) - ln);
    }
    if (!usable) continue;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Walk counts vs spectral power sums

// tr(A^k) for k = 0..kmax by dynamic programming over walks from each vertex.
inline std::vector<std::uint64_t> closed_walk_counts(const Graph& g, int kmax) {
  std::vector<std::uint64_t> totals(static_cast<std::size_t>(kmax) + 1, 0);
  const std::size_t n = g.vertex_count();
  std::vector<std::uint64_t> cur(n), next(n);
  for (std::uint32_t s = 0; s < n; ++s) {
    std::fill(cur.begin(), cur.end(), 0);
    cur[s] = 1;
    totals[0] += 1;
    for (int k = 1; k <= kmax; ++k) {
      std::fill(next.begin(), next.end(), 0);
      for (std::uint32_t v = 0; v < n; ++v)
        if (cur[v])
          for (auto u : g.adj[v]) next[u] += cur[v];
      cur.swap(next);
      totals[static_cast<std::size_t>(k)] += cur[s];
    }
  }
  return totals;
}

// tr(B^k): cyclically non-backtracking closed walks, counted over directed-edge sequences.
inline std::vector<std::uint64_t> closed_nonbacktracking_walk_counts(const Graph& g, int kmax) {
  DirectedEdges de(g);
  std::vector<std::uint64_t> totals(static_cast<std::size_t>(kmax) + 1, 0);
  const std::size_t m = de.size();
  std::vector<std::uint64_t> cur(m), next(m);
  for (std::size_t s = 0; s < m; ++s) {
    std::fill(cur.begin(), cur.end(), 0);
    cur[s] = 1;
    totals[0] += 1;
    for (int k = 1; k <= kmax; ++k) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t e = 0; e < m; ++e) {
        if (!cur[e]) continue;
        auto v = de.head[e];
        for (std::size_t f = de.offset[v]; f < de.offset[v + 1]; ++f)
          if (de.head[f] != de.tail[e]) next[f] += cur[e];
      }
      cur.swap(next);
      totals[static_cast<std::size_t>(k)] += cur[s];
    }
  }
  return totals;
}

struct WalkTraceRow {
  int k = 0;
  std::uint64_t adjacency_walks = 0;
  double adjacency_power_sum = 0.0;
  double adjacency_rel_error = 0.0;
  std::uint64_t nb_walks = 0;
  double nb_power_sum = 0.0;
  double nb_rel_error = 0.0;
};

struct WalkTraceReport {
  std::vector<WalkTraceRow> rows;
  double worst = 0.0;
  bool passed = false;
};

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline WalkTraceReport walk_trace_check(const Graph& g, int kmax, const GraphSpectrum& adjacency,
                                        const GraphSpectrum& nb, double tol = 1e-6) {
  if (kmax < 1 || kmax > 8) throw InputError("walk_trace_check: k must lie in [1, 8]");
  if (g.vertex_count() > 2000) throw ResourceError("walk_trace_check: more than 2000 vertices");
  auto aw = closed_walk_counts(g, kmax);
  auto bw = closed_nonbacktracking_walk_counts(g, kmax);
  WalkTraceReport rep;
  for (int k = 1; k <= kmax; ++k) {
    WalkTraceRow row;
    row.k = k;
    row.adjacency_walks = aw[static_cast<std::size_t>(k)];
    row.nb_walks = bw[static_cast<std::size_t>(k)];
    for (double l : adjacency.real) row.adjacency_power_sum += std::pow(l, k);
    cplx s = 0.0;
    for (cplx m : nb.complex) s += std::pow(m, k);
    row.nb_power_sum = s.real();
    row.adjacency_rel_error = relative_gap(row.adjacency_power_sum, static_cast<double>(row.adjacency_walks));
    row.nb_rel_error = std::max(relative_gap(row.nb_power_sum, static_cast<double>(row.nb_walks)),
                                std::abs(s.imag()) / std::max(1.0, static_cast<double>(row.nb_walks)));
    rep.worst = std::max({rep.worst, row.adjacency_rel_error, row.nb_rel_error});
    rep.rows.push_back(row);
  }
  rep.passed = rep.worst < tol;
  return rep;
}

}  // namespace latlab

#endif
