#ifndef LATLAB_GRAPH_HPP
#define LATLAB_GRAPH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "latlab/errors.hpp"

namespace latlab {

/// Undirected graph stored as neighbour lists. Multi-edges appear as repeated
/// neighbours; a self-loop contributes its vertex twice to its own list.
struct Graph {
  std::vector<std::vector<std::uint32_t>> adj;
  std::string provenance;

  std::size_t vertex_count() const { return adj.size(); }

  std::size_t edge_count() const {
    std::size_t s = 0;
    for (const auto& a : adj) s += a.size();
    return s / 2;
  }

  // Common degree, or -1 if the graph is not regular.
  int degree() const {
    if (adj.empty()) return -1;
    auto k = adj[0].size();
    for (const auto& a : adj)
      if (a.size() != k) return -1;
    return static_cast<int>(k);
  }

  bool regular() const { return degree() >= 0; }

  bool simple() const {
    for (std::uint32_t v = 0; v < adj.size(); ++v) {
      auto nb = adj[v];
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;
      if (std::binary_search(nb.begin(), nb.end(), v)) return false;
    }
    return true;
  }

  // Every edge u-v is listed from both ends with equal multiplicity.
  bool symmetric() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> fwd, bwd;
    for (std::uint32_t v = 0; v < adj.size(); ++v)
      for (auto u : adj[v]) {
        if (u >= adj.size()) return false;
        fwd.emplace_back(v, u);
        bwd.emplace_back(u, v);
      }
    std::sort(fwd.begin(), fwd.end());
    std::sort(bwd.begin(), bwd.end());
    return fwd == bwd;
  }

  // BFS distances from `source`; -1 for unreachable vertices.
  std::vector<int> distances_from(std::uint32_t source) const {
    std::vector<int> dist(adj.size(), -1);
    std::vector<std::uint32_t> queue{source};
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      auto v = queue[head];
      for (auto u : adj[v])
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
    }
    return dist;
  }

  bool connected() const {
    if (adj.empty()) return true;
    auto d = distances_from(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
  }

  bool bipartite() const {
    std::vector<int> side(adj.size(), -1);
    for (std::uint32_t s = 0; s < adj.size(); ++s) {
      if (side[s] >= 0) continue;
      side[s] = 0;
      std::vector<std::uint32_t> queue{s};
      for (std::size_t head = 0; head < queue.size(); ++head) {
        auto v = queue[head];
        for (auto u : adj[v]) {
          if (side[u] < 0) {
            side[u] = 1 - side[v];
            queue.push_back(u);
          } else if (side[u] == side[v]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  static Graph from_edges(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                          std::string provenance = "edges") {
    Graph g;
    g.adj.resize(n);
    g.provenance = std::move(provenance);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw InputError("edge endpoint out of range");
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
    return g;
  }
};

/// Reads "u v" pairs, one per line, 0-indexed. Blank lines and '#' comments are skipped.
inline Graph read_edge_list(std::istream& in, std::string provenance = "file") {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u)) continue;
    if (!(ls >> v) || u < 0 || v < 0)
      throw InputError("edge list line " + std::to_string(lineno) + ": expected two non-negative vertex ids");
    std::string extra;
    if (ls >> extra) throw InputError("edge list line " + std::to_string(lineno) + ": trailing tokens");
    edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  return Graph::from_edges(n, edges, std::move(provenance));
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  for (std::uint32_t u = 0; u < g.adj.size(); ++u) {
    // Each undirected edge once; self-loops listed twice in adj are written once per pair.
    std::vector<std::uint32_t> loops;
    for (auto v : g.adj[u]) {
      if (u < v) out << u << ' ' << v << '\n';
      if (u == v) loops.push_back(v);
    }
    for (std::size_t i = 0; i + 1 < loops.size(); i += 2) out << u << ' ' << u << '\n';
  }
}

// ---------------------------------------------------------------------------
// Arithmetic helpers over F_p

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod) {
  std::int64_t r = 1 % mod;
  base %= mod;
  if (base < 0) base += mod;
  while (exp > 0) {
    if (exp & 1) r = static_cast<std::int64_t>(static_cast<__int128>(r) * base % mod);
    base = static_cast<std::int64_t>(static_cast<__int128>(base) * base % mod);
    exp >>= 1;
  }
  return r;
}

// Legendre symbol (a | p) for an odd prime p, via Euler's criterion.
inline int legendre(std::int64_t a, std::int64_t p) {
  std::int64_t r = pow_mod(a, (p - 1) / 2, p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

namespace detail {

// 2x2 matrices over F_p packed as 4 residues.
using Mat2p = std::array<std::int64_t, 4>;

inline Mat2p mul_mod(const Mat2p& x, const Mat2p& y, std::int64_t p) {
  return {(x[0] * y[0] + x[1] * y[2]) % p, (x[0] * y[1] + x[1] * y[3]) % p, (x[2] * y[0] + x[3] * y[2]) % p,
          (x[2] * y[1] + x[3] * y[3]) % p};
}

inline std::uint64_t pack(const Mat2p& m, std::int64_t p) {
  std::uint64_t k = 0;
  for (auto v : m) k = k * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(v);
  return k;
}

// Representative of the scalar class of m in PGL2(F_p): first non-zero entry scaled to 1.
inline Mat2p projective_normalize(const Mat2p& m, std::int64_t p) {
  for (auto v : m) {
    if (v == 0) continue;
    std::int64_t inv = pow_mod(v, p - 2, p);
    Mat2p out{};
    for (int i = 0; i < 4; ++i) out[i] = m[i] * inv % p;
    return out;
  }
  throw NumericalError("projective_normalize: zero matrix");
}

// Right Cayley graph of the group generated by `gens` (already normalized if projective).
inline Graph cayley_bfs(const std::vector<Mat2p>& gens, std::int64_t p, bool projective, std::size_t expected,
                        std::string provenance) {
  Mat2p id{1, 0, 0, 1};
  std::vector<Mat2p> elems{id};
  std::unordered_map<std::uint64_t, std::uint32_t> index{{pack(id, p), 0}};
  Graph g;
  g.provenance = std::move(provenance);
  for (std::size_t v = 0; v < elems.size(); ++v) {
    if (elems.size() > expected) throw NumericalError("Cayley BFS exceeded the expected group order");
    g.adj.emplace_back();
    for (const auto& s : gens) {
      Mat2p w = mul_mod(elems[v], s, p);
      if (projective) w = projective_normalize(w, p);
      auto [it, inserted] = index.try_emplace(pack(w, p), static_cast<std::uint32_t>(elems.size()));
      if (inserted) elems.push_back(w);
      g.adj[v].push_back(it->second);
    }
  }
  return g;
}

}  // namespace detail

struct LpsOptions {
  bool allow_bipartite = true;  // build the PGL2 variant when (p | q) = -1
};

/// Lubotzky-Phillips-Sarnak graph X^{p,q}: the (p+1)-regular Cayley graph on
/// PSL2(F_q) (when p is a square mod q) or on PGL2(F_q) (bipartite otherwise),
/// with generators from the p+1 integer quaternions a^2+b^2+c^2+d^2 = p, a > 0 odd,
/// b, c, d even.
inline Graph build_lps(std::int64_t p, std::int64_t q, LpsOptions opt = {}) {
  if (!is_prime(p) || !is_prime(q) || p == q) throw InputError("build_lps: p and q must be distinct primes");
  if (p % 4 != 1 || q % 4 != 1) throw InputError("build_lps: p and q must be 1 mod 4");
  if (!(static_cast<double>(q) > 2.0 * std::sqrt(static_cast<double>(p))))
    throw InputError("build_lps: need q > 2 sqrt(p)");
  const int symbol = legendre(p, q);
  if (symbol != 1 && !opt.allow_bipartite)
    throw InputError("build_lps: p is not a quadratic residue mod q (bipartite PGL2 case disabled)");

  std::int64_t i_unit = -1;
  for (std::int64_t x = 1; x < q; ++x)
    if (x * x % q == q - 1) {
      i_unit = x;
      break;
    }

  std::vector<detail::Mat2p> gens;
  auto lim = static_cast<std::int64_t>(std::sqrt(static_cast<double>(p))) + 1;
  for (std::int64_t a = 1; a <= lim; a += 2)
    for (std::int64_t b = -lim; b <= lim; ++b)
      for (std::int64_t c = -lim; c <= lim; ++c)
        for (std::int64_t d = -lim; d <= lim; ++d) {
          if (b % 2 || c % 2 || d % 2) continue;
          if (a * a + b * b + c * c + d * d != p) continue;
          auto m = [q](std::int64_t v) { return ((v % q) + q) % q; };
          detail::Mat2p g{m(a + b * i_unit), m(c + d * i_unit), m(-c + d * i_unit), m(a - b * i_unit)};
          gens.push_back(detail::projective_normalize(g, q));
        }
  if (static_cast<std::int64_t>(gens.size()) != p + 1)
    throw NumericalError("build_lps: found " + std::to_string(gens.size()) + " quaternion generators, expected p+1");

  std::size_t order = static_cast<std::size_t>(q * (q * q - 1));
  std::size_t expected = symbol == 1 ? order / 2 : order;
  std::ostringstream name;
  name << "LPS(" << p << "," << q << ")" << (symbol == 1 ? " PSL2" : " PGL2 bipartite");
  Graph g = detail::cayley_bfs(gens, q, true, expected, name.str());
  if (g.vertex_count() != expected)
    throw NumericalError("build_lps: generated " + std::to_string(g.vertex_count()) + " vertices, expected " +
                         std::to_string(expected));
  if (!g.symmetric()) throw NumericalError("build_lps: generator set is not closed under inverses");
  return g;
}

/// Generator families for SL2(F_p) Cayley graphs.
enum class Sl2Family {
  unipotent,  // [[1,+-1],[0,1]], [[1,0],[+-1,1]]
  st,         // [[1,+-1],[0,1]], [[0,-1],[1,0]], [[0,1],[-1,0]]
};

inline Graph build_cayley_sl2(std::int64_t p, Sl2Family family = Sl2Family::unipotent) {
  if (p < 3 || !is_prime(p)) throw InputError("build_cayley_sl2: p must be a prime >= 3");
  std::vector<detail::Mat2p> gens;
  if (family == Sl2Family::unipotent)
    gens = {{1, 1, 0, 1}, {1, p - 1, 0, 1}, {1, 0, 1, 1}, {1, 0, p - 1, 1}};
  else
    gens = {{1, 1, 0, 1}, {1, p - 1, 0, 1}, {0, p - 1, 1, 0}, {0, 1, p - 1, 0}};
  std::size_t order = static_cast<std::size_t>(p * (p * p - 1));
  Graph g = detail::cayley_bfs(gens, p, false, order, "Cayley SL2(F_" + std::to_string(p) + ")");
  if (g.vertex_count() != order)
    throw InputError("build_cayley_sl2: generators reach " + std::to_string(g.vertex_count()) + " of " +
                     std::to_string(order) + " elements; the Cayley graph is disconnected");
  return g;
}

inline constexpr std::size_t kRandomRegularAttempts = 10'000'000;

/// Uniform simple k-regular graph on n vertices: the configuration model's random
/// stub matching, restarted whenever a loop or repeated edge appears.
inline Graph random_regular(std::size_t n, int k, std::uint64_t seed, std::size_t max_attempts = kRandomRegularAttempts) {
  if (k < 0 || n <= static_cast<std::size_t>(k)) throw InputError("random_regular: need n > k >= 0");
  if ((n * static_cast<std::size_t>(k)) % 2 != 0) throw InputError("random_regular: n k must be even");
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> stubs;
  for (std::uint32_t v = 0; v < n; ++v)
    for (int j = 0; j < k; ++j) stubs.push_back(v);
  Graph g;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    g.adj.assign(n, {});
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      std::uniform_int_distribution<std::size_t> pick(i + 1, stubs.size() - 1);
      std::swap(stubs[i + 1], stubs[pick(rng)]);
      auto u = stubs[i], v = stubs[i + 1];
      if (u == v || std::find(g.adj[u].begin(), g.adj[u].end(), v) != g.adj[u].end()) {
        ok = false;
        break;
      }
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
    if (ok) {
      std::ostringstream name;
      name << "RandomRegular(" << n << "," << k << "," << seed << ")";
      g.provenance = name.str();
      return g;
    }
  }
  throw ResourceError("random_regular: rejection cap exceeded");
}

// Small named graphs used in tests and the acceptance suite.
inline Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i < n; ++i) e.emplace_back(i, static_cast<std::uint32_t>((i + 1) % n));
  return Graph::from_edges(n, e, "C" + std::to_string(n));
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e, "K" + std::to_string(n));
}

inline Graph petersen_graph() {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(i + 5, (i + 2) % 5 + 5);
  }
  return Graph::from_edges(10, e, "Petersen");
}

}  // namespace latlab

#endif
