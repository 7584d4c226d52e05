#ifndef LATLAB_ORACLE_ORACLES_HPP
#define LATLAB_ORACLE_ORACLES_HPP

// Slow, formula-free reference computations used by the tests and the acceptance
// suite. Nothing here is used by the library proper.

#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "latlab/errors.hpp"
#include "latlab/graph.hpp"

namespace latlab::oracle {

/// |B_{r1}(x) cap B_{r2}(y)| on the (q+1)-regular tree with d(x, y) = d, by growing
/// the subtree B_{r1}(x) together with a geodesic of length d from x to y and running
/// BFS from y. The grown set is a subtree, so its internal distances are tree distances.
inline std::uint64_t tree_ball_intersection(int q, int r1, int r2, int d) {
  if (q < 1 || r1 < 0 || r2 < 0 || d < 0) throw InputError("tree oracle: bad arguments");
  std::vector<std::vector<std::uint32_t>> adj(1);
  std::vector<int> depth{0};
  std::vector<char> on_path{1};
  std::uint32_t y = 0;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    int children = v == 0 ? q + 1 : q;
    for (int c = 0; c < children; ++c) {
      bool path_child = on_path[v] && c == 0;
      int dd = depth[v] + 1;
      if (dd > r1 && !(path_child && dd <= d)) continue;
      auto u = static_cast<std::uint32_t>(adj.size());
      adj.emplace_back();
      adj[v].push_back(u);
      adj[u].push_back(static_cast<std::uint32_t>(v));
      depth.push_back(dd);
      on_path.push_back(path_child && dd <= d);
      if (path_child && dd == d) y = u;
    }
  }
  std::vector<int> dist(adj.size(), -1);
  std::vector<std::uint32_t> queue{y};
  dist[y] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (auto u : adj[queue[h]])
      if (dist[u] < 0) {
        dist[u] = dist[queue[h]] + 1;
        queue.push_back(u);
      }
  std::uint64_t count = 0;
  for (std::size_t v = 0; v < adj.size(); ++v) count += depth[v] <= r1 && dist[v] <= r2;
  return count;
}

/// #{g in M_n(Z/N) : det g = 1} by exhaustive enumeration of all N^{n^2} tuples.
inline std::uint64_t count_sl_mod(int n, std::int64_t N) {
  if (n != 2 && n != 3) throw InputError("count_sl_mod: n must be 2 or 3");
  std::uint64_t total = 1;
  for (int i = 0; i < n * n; ++i) total *= static_cast<std::uint64_t>(N);
  if (total > 50'000'000) throw ResourceError("count_sl_mod: too many tuples");
  std::vector<std::int64_t> e(static_cast<std::size_t>(n * n));
  std::uint64_t count = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (auto& x : e) {
      x = static_cast<std::int64_t>(c % static_cast<std::uint64_t>(N));
      c /= static_cast<std::uint64_t>(N);
    }
    std::int64_t det = n == 2 ? e[0] * e[3] - e[1] * e[2]
                              : e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
                                    e[2] * (e[3] * e[7] - e[4] * e[6]);
    count += ((det % N) + N) % N == 1 % N;
  }
  return count;
}

/// Points of P^1(Z/N): pairs (x, y) generating Z/N, modulo multiplication by units.
inline std::vector<std::pair<std::int64_t, std::int64_t>> projective_line(std::int64_t N) {
  std::set<std::pair<std::int64_t, std::int64_t>> reps;
  for (std::int64_t x = 0; x < N; ++x)
    for (std::int64_t y = 0; y < N; ++y) {
      if (std::gcd(std::gcd(x, y), N) != 1) continue;
      std::pair<std::int64_t, std::int64_t> best{N, N};
      for (std::int64_t u = 1; u < N; ++u)
        if (std::gcd(u, N) == 1) best = std::min(best, std::pair{x * u % N, y * u % N});
      reps.insert(best);
    }
  return {reps.begin(), reps.end()};
}

/// Number of points [x:y] of P^1(Z/N) with [x:y] g = [x:y] for g = [[a,b],[c,d]].
inline std::uint64_t projective_fixed_points(std::int64_t N, std::int64_t a, std::int64_t b, std::int64_t c,
                                             std::int64_t d) {
  auto m = [N](std::int64_t v) { return ((v % N) + N) % N; };
  std::uint64_t fixed = 0;
  for (auto [x, y] : projective_line(N)) {
    std::int64_t x2 = m(x * a + y * c), y2 = m(x * b + y * d);
    bool same = false;
    for (std::int64_t u = 1; u < N && !same; ++u)
      if (std::gcd(u, N) == 1 && m(x * u) == x2 && m(y * u) == y2) same = true;
    fixed += same;
  }
  return fixed;
}

/// #{g in SL2(Z) : max |entry| <= T} by looping over (a, b, c) and solving for d.
inline std::uint64_t sl2_ball_size(std::int64_t T) {
  std::uint64_t count = 0;
  for (std::int64_t a = -T; a <= T; ++a)
    for (std::int64_t b = -T; b <= T; ++b)
      for (std::int64_t c = -T; c <= T; ++c) {
        if (a == 0) {
          if (b * c == -1) count += static_cast<std::uint64_t>(2 * T + 1);
        } else if ((1 + b * c) % a == 0) {
          std::int64_t d = (1 + b * c) / a;
          count += d >= -T && d <= T;
        }
      }
  return count;
}

/// Exact integer determinant (Bareiss fraction-free elimination).
inline boost::multiprecision::cpp_int exact_det(std::vector<std::vector<boost::multiprecision::cpp_int>> m) {
  using boost::multiprecision::cpp_int;
  const std::size_t n = m.size();
  cpp_int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// det(x I - A) for the adjacency matrix of g at an integer point x.
inline boost::multiprecision::cpp_int characteristic_polynomial_at(const Graph& g, std::int64_t x) {
  using boost::multiprecision::cpp_int;
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<cpp_int>> m(n, std::vector<cpp_int>(n, 0));
  for (std::size_t v = 0; v < n; ++v) {
    m[v][v] += x;
    for (auto u : g.adj[v]) m[v][u] -= 1;
  }
  return exact_det(std::move(m));
}

}  // namespace latlab::oracle

#endif
