#ifndef LATLAB_COUNTING_HPP
#define LATLAB_COUNTING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "latlab/cartan.hpp"
#include "latlab/errors.hpp"
#include "latlab/matgroups.hpp"
#include "latlab/parallel.hpp"

namespace latlab {

/// Plain 2x2 integer matrix [[a, b], [c, d]] used in the hot counting loops.
struct Sl2 {
  std::int64_t a, b, c, d;

  std::int64_t max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }
  IntMatrix to_int_matrix() const { return IntMatrix{{a, b}, {c, d}}; }
  friend bool operator==(const Sl2&, const Sl2&) = default;
  friend auto operator<=>(const Sl2&, const Sl2&) = default;
};

inline Sl2 to_sl2(const IntMatrix& g) {
  if (g.dim() != 2) throw InputError("expected a 2x2 matrix");
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!g(i, j).is_small() || std::abs(g(i, j).small()) > (std::int64_t{1} << 30))
        throw InputError("conjugator entries too large for the counting kernels");
  return {g(0, 0).small(), g(0, 1).small(), g(1, 0).small(), g(1, 1).small()};
}

inline Sl2 mul(const Sl2& x, const Sl2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Sl2 inv(const Sl2& x) { return {x.d, -x.b, -x.c, x.a}; }

inline bool satisfies_pattern(const SubgroupSpec& spec, const std::int64_t* e) {
  const int n = spec.dim();
  for (const auto& [i, j, t] : spec.pattern())
    if (floor_mod(e[i * n + j] - t, spec.level) != 0) return false;
  return true;
}

inline bool in_subgroup(const SubgroupSpec& spec, const Sl2& g) {
  std::array<std::int64_t, 4> e{g.a, g.b, g.c, g.d};
  return satisfies_pattern(spec, e.data());
}

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Solutions x with lo <= base + x*step <= hi, intersected into [kmin, kmax].
inline void clamp_line(std::int64_t base, std::int64_t step, std::int64_t lo, std::int64_t hi, std::int64_t& kmin,
                       std::int64_t& kmax) {
  if (step == 0) {
    if (base < lo || base > hi) kmax = kmin - 1;
    return;
  }
  std::int64_t k1 = step > 0 ? ceil_div(lo - base, step) : ceil_div(hi - base, step);
  std::int64_t k2 = step > 0 ? floor_div(hi - base, step) : floor_div(lo - base, step);
  kmin = std::max(kmin, k1);
  kmax = std::min(kmax, k2);
}

// Returns g = gcd(a, b) >= 0 and x, y with a x + b y = g.
inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
    std::tie(old_t, t) = std::pair{t, old_t - q * t};
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

}  // namespace detail

/// Calls visit(g) for every g in SL2(Z) with max |entry| <= T and top-left entry
/// a in [a_lo, a_hi]. For each coprime top row (a, b) the bottom rows form the line
/// (c0 + k a, d0 + k b).
template <typename Visit>
void for_each_sl2_in_rows(std::int64_t T, std::int64_t a_lo, std::int64_t a_hi, Visit&& visit) {
  for (std::int64_t a = std::max(a_lo, -T); a <= std::min(a_hi, T); ++a) {
    for (std::int64_t b = -T; b <= T; ++b) {
      std::int64_t x, y;
      if (detail::ext_gcd(a, b, x, y) != 1) continue;
      // a x + b y = 1, so (c, d) = (-y, x) solves a d - b c = 1.
      std::int64_t c0 = -y, d0 = x;
      std::int64_t kmin = std::numeric_limits<std::int64_t>::min() / 4, kmax = std::numeric_limits<std::int64_t>::max() / 4;
      detail::clamp_line(c0, a, -T, T, kmin, kmax);
      detail::clamp_line(d0, b, -T, T, kmin, kmax);
      for (std::int64_t k = kmin; k <= kmax; ++k) visit(Sl2{a, b, c0 + k * a, d0 + k * b});
    }
  }
}

template <typename Visit>
void for_each_sl2_in_box(std::int64_t T, Visit&& visit) {
  for_each_sl2_in_rows(T, -T, T, std::forward<Visit>(visit));
}

inline std::vector<Sl2> sl2_box(std::int64_t T) {
  std::vector<Sl2> out;
  for_each_sl2_in_box(T, [&](const Sl2& g) { out.push_back(g); });
  return out;
}

enum class BoundKind { norm, length };

struct BallCount {
  SubgroupSpec spec;
  BoundKind bound_kind = BoundKind::norm;
  double bound = 0.0;
  std::optional<IntMatrix> conjugator;
  std::uint64_t count = 0;
};

inline constexpr std::int64_t kBruteMaxSl2 = 1000;
inline constexpr std::int64_t kBruteMaxSl3 = 40;
inline constexpr double kBruteSl3WorkCap = 2e9;

namespace detail {

inline std::uint64_t brute_sl2(const SubgroupSpec& spec, std::int64_t T, const std::optional<IntMatrix>& y,
                               unsigned threads) {
  std::optional<Sl2> conj, conj_inv;
  if (y) {
    conj = to_sl2(*y);
    conj_inv = inv(*conj);
  }
  // delta = y^{-1} gamma y ranges over the box; gamma = y delta y^{-1} must lie in the subgroup.
  auto accept = [&](const Sl2& delta) {
    return conj ? in_subgroup(spec, mul(mul(*conj, delta), *conj_inv)) : in_subgroup(spec, delta);
  };
  const std::size_t width = static_cast<std::size_t>(2 * T + 1);
  std::vector<std::uint64_t> partial(width, 0);
  parallel_chunks(width, width, threads, [&](std::size_t ai, std::size_t, std::size_t) {
    const std::int64_t a = static_cast<std::int64_t>(ai) - T;
    std::uint64_t count = 0;
    for (std::int64_t b = -T; b <= T; ++b) {
      for (std::int64_t c = -T; c <= T; ++c) {
        if (a == 0) {
          if (b * c != -1) continue;
          for (std::int64_t d = -T; d <= T; ++d) count += accept(Sl2{a, b, c, d});
          continue;
        }
        std::int64_t num = 1 + b * c;
        if (num % a != 0) continue;
        std::int64_t d = num / a;
        if (d < -T || d > T) continue;
        count += accept(Sl2{a, b, c, d});
      }
    }
    partial[ai] = count;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

inline std::uint64_t brute_sl3(const SubgroupSpec& spec, std::int64_t T, const std::optional<IntMatrix>& y) {
  const std::int64_t N = spec.level;
  // Candidate values per entry: residue-filtered when no conjugator is applied.
  std::array<std::vector<std::int64_t>, 9> values;
  std::array<std::optional<std::int64_t>, 9> target;
  if (!y)
    for (const auto& [i, j, t] : spec.pattern()) target[i * 3 + j] = t;
  double work = 1.0;
  for (int k = 0; k < 9; ++k) {
    for (std::int64_t v = -T; v <= T; ++v)
      if (!target[k] || floor_mod(v - *target[k], N) == 0) values[k].push_back(v);
    if (k < 8) work *= static_cast<double>(values[k].size());
  }
  if (work > kBruteSl3WorkCap) throw ResourceError("count_bruteforce: SL3 enumeration exceeds the work cap");

  std::array<std::int64_t, 9> yi{}, ye{};
  if (y) {
    auto yinv = y->inverse();
    for (int k = 0; k < 9; ++k) {
      ye[k] = (*y)(k / 3, k % 3).small();
      yi[k] = yinv(k / 3, k % 3).small();
    }
  }
  auto accept = [&](const std::array<std::int64_t, 9>& delta) {
    if (!y) return satisfies_pattern(spec, delta.data());
    std::array<std::int64_t, 9> t{}, g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) t[i * 3 + j] += ye[i * 3 + k] * delta[k * 3 + j];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) g[i * 3 + j] += t[i * 3 + k] * yi[k * 3 + j];
    return satisfies_pattern(spec, g.data());
  };

  std::uint64_t count = 0;
  std::array<std::int64_t, 9> m{};
  for (auto v0 : values[0])
    for (auto v1 : values[1])
      for (auto v2 : values[2])
        for (auto v3 : values[3])
          for (auto v4 : values[4])
            for (auto v5 : values[5]) {
              m = {v0, v1, v2, v3, v4, v5, 0, 0, 0};
              // Third row x satisfies x . (r0 x r1) = 1.
              std::int64_t cx = v1 * v5 - v2 * v4, cy = v2 * v3 - v0 * v5, cz = v0 * v4 - v1 * v3;
              for (auto x0 : values[6])
                for (auto x1 : values[7]) {
                  m[6] = x0;
                  m[7] = x1;
                  std::int64_t rest = 1 - x0 * cx - x1 * cy;
                  if (cz == 0) {
                    if (rest != 0) continue;
                    for (auto x2 : values[8]) {
                      m[8] = x2;
                      count += accept(m);
                    }
                  } else {
                    if (rest % cz != 0) continue;
                    std::int64_t x2 = rest / cz;
                    if (x2 < -T || x2 > T) continue;
                    if (target[8] && floor_mod(x2 - *target[8], N) != 0) continue;
                    m[8] = x2;
                    count += accept(m);
                  }
                }
            }
  return count;
}

}  // namespace detail

/// Exhaustive count of gamma in the subgroup with every entry of y^{-1} gamma y
/// bounded by T in absolute value. This is the oracle for the fast counter.
inline BallCount count_bruteforce(const SubgroupSpec& spec, std::int64_t T,
                                  const std::optional<IntMatrix>& conjugator = std::nullopt,
                                  unsigned threads = default_threads()) {
  spec.validate();
  if (T < 0) throw InputError("count_bruteforce: T must be >= 0");
  if (conjugator && conjugator->dim() != spec.dim()) throw InputError("count_bruteforce: conjugator dimension mismatch");
  BallCount out{spec, BoundKind::norm, static_cast<double>(T), conjugator, 0};
  if (spec.ambient == Ambient::sl2) {
    if (T > kBruteMaxSl2) throw ResourceError("count_bruteforce: SL2 bound above " + std::to_string(kBruteMaxSl2));
    out.count = detail::brute_sl2(spec, T, conjugator, threads);
  } else {
    if (T > kBruteMaxSl3) throw ResourceError("count_bruteforce: SL3 bound above " + std::to_string(kBruteMaxSl3));
    out.count = detail::brute_sl3(spec, T, conjugator);
  }
  return out;
}

namespace detail {

inline std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
  std::vector<bool> composite(static_cast<std::size_t>(limit + 1), false);
  std::vector<std::int64_t> primes;
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::int64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

// Positive divisors of m (m >= 1) that are <= cap. `primes` must reach sqrt(m).
inline void divisors_up_to(std::int64_t m, std::int64_t cap, const std::vector<std::int64_t>& primes,
                           std::vector<std::int64_t>& out) {
  out.assign(1, 1);
  for (auto p : primes) {
    if (p * p > m) break;
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    std::size_t base = out.size();
    std::int64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i)
        if (out[i] * pk <= cap) out.push_back(out[i] * pk);
    }
  }
  if (m > 1) {
    std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i)
      if (out[i] * m <= cap) out.push_back(out[i] * m);
  }
}

}  // namespace detail

/// Counts gamma in the principal congruence subgroup Gamma(N) of SL2(Z) with
/// max |entry| <= T, using a + d - 2 = -(a-1)(d-1) + bc == 0 mod N^2 to restrict
/// the diagonal, then enumerating factorizations bc = ad - 1.
inline BallCount count_sarnak_xue_fast(std::int64_t N, std::int64_t T, unsigned threads = default_threads()) {
  if (N < 1) throw InputError("count_sarnak_xue_fast: N must be >= 1");
  if (T < 0) throw InputError("count_sarnak_xue_fast: T must be >= 0");
  if (T > 3'000'000) throw ResourceError("count_sarnak_xue_fast: T above 3e6");
  const auto primes = detail::primes_up_to(T + 1);
  const std::int64_t N2 = N * N;
  const std::int64_t a_first = -T + floor_mod(1 - (-T), N);
  std::vector<std::int64_t> avals;
  for (std::int64_t a = a_first; a <= T; a += N) avals.push_back(a);
  const std::int64_t zero_line = 2 * (T / N) + 1;  // multiples of N in [-T, T]

  std::vector<std::uint64_t> partial(avals.size(), 0);
  parallel_chunks(avals.size(), avals.size(), threads, [&](std::size_t i, std::size_t, std::size_t) {
    const std::int64_t a = avals[i];
    std::vector<std::int64_t> divs;
    std::uint64_t count = 0;
    const std::int64_t d_first = -T + floor_mod((2 - a) - (-T), N2);
    for (std::int64_t d = d_first; d <= T; d += N2) {
      const std::int64_t m = a * d - 1;  // = bc
      if (m == 0) {
        count += static_cast<std::uint64_t>(2 * zero_line - 1);  // b = 0 or c = 0
        continue;
      }
      detail::divisors_up_to(std::abs(m), T, primes, divs);
      for (auto e : divs) {
        if (e % N != 0) continue;
        const std::int64_t other = std::abs(m) / e;
        if (other > T || other % N != 0) continue;
        count += 2;  // b = +e or -e, c = m / b
      }
    }
    partial[i] = count;
  });
  BallCount out{SubgroupSpec::principal(N), BoundKind::norm, static_cast<double>(T), std::nullopt, 0};
  out.count = std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
  return out;
}

/// Number of cosets Gamma_N y fixed by gamma, i.e. #{y : y gamma y^{-1} in Gamma_N}.
inline std::uint64_t fixed_point_count(const QuotientSpace& quotient, const IntMatrix& gamma) {
  if (gamma.dim() != quotient.spec().dim()) throw InputError("fixed_point_count: dimension mismatch");
  ModMatrix g = reduce_mod(gamma, quotient.spec().level);
  std::uint64_t fixed = 0;
  for (std::uint32_t c = 0; c < quotient.index(); ++c) fixed += quotient.act(c, g) == c;
  return fixed;
}

/// (2 floor(T/N) + 1)^{n(n-1)/2}: size of the unipotent upper-triangular family in
/// Gamma(N) with entries bounded by T.
inline std::uint64_t sl_n_lower_bound(int n, std::int64_t N, std::int64_t T) {
  if (n != 2 && n != 3) throw InputError("sl_n_lower_bound: n must be 2 or 3");
  if (N < 1 || T < 0) throw InputError("sl_n_lower_bound: need N >= 1 and T >= 0");
  std::uint64_t per_entry = static_cast<std::uint64_t>(2 * (T / N) + 1);
  std::uint64_t out = 1;
  for (int k = 0; k < n * (n - 1) / 2; ++k) out *= per_entry;
  return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("loglog_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Weak injective radius profiles

enum class LengthKind { cartan, log_norm };
enum class ProfileMethod { conjugator_average, fixed_points };

inline double sl2_length(const Sl2& g, LengthKind kind) {
  if (kind == LengthKind::log_norm) return 2.0 * std::log(static_cast<double>(g.max_abs()));
  Eigen::MatrixXd m(2, 2);
  m << static_cast<double>(g.a), static_cast<double>(g.b), static_cast<double>(g.c), static_cast<double>(g.d);
  return cartan_length(m);
}

/// For each coset, a lift to SL2(Z) of smallest sup-norm (ties broken
/// lexicographically), searched over boxes of growing size up to N^2.
inline std::vector<Sl2> minimal_lifts(const QuotientSpace& quotient) {
  if (quotient.spec().ambient != Ambient::sl2) throw InputError("minimal_lifts: SL2 only");
  const std::int64_t N = quotient.spec().level;
  const std::int64_t cap = std::max<std::int64_t>(1, N * N);
  for (std::int64_t T = 1;; T = std::min(cap, 2 * T)) {
    auto box = sl2_box(T);
    std::sort(box.begin(), box.end(), [](const Sl2& x, const Sl2& y) {
      auto mx = x.max_abs(), my = y.max_abs();
      return mx != my ? mx < my : x < y;
    });
    std::vector<std::optional<Sl2>> lifts(quotient.index());
    std::size_t found = 0;
    for (const auto& g : box) {
      auto c = quotient.coset_of(g.to_int_matrix());
      if (!lifts[c]) {
        lifts[c] = g;
        ++found;
      }
    }
    if (found == quotient.index()) {
      std::vector<Sl2> out;
      for (auto& l : lifts) out.push_back(*l);
      return out;
    }
    if (T == cap) throw ResourceError("minimal_lifts: some coset has no lift with entries <= N^2");
  }
}

struct RadiusRow {
  double d0 = 0.0;
  std::uint64_t total = 0;  // sum over cosets of N(Gamma_N, d0, y)
  double averaged = 0.0;    // total / index
  double reference = 0.0;   // e^{d0/2}
  double ratio = 0.0;
};

struct RadiusProfile {
  SubgroupSpec spec;
  std::size_t index = 0;
  std::vector<RadiusRow> rows;
};

/// Averaged ball counts (1/index) sum_y #{gamma in Gamma_N : l(y^{-1} gamma y) <= d0}
/// over a d0 grid, computed either by conjugating with coset lifts or through the
/// fixed-point identity sum_{l(delta) <= d0} c(delta).
inline RadiusProfile radius_profile(const QuotientSpace& quotient, std::vector<double> grid, LengthKind kind,
                                    ProfileMethod method, const std::vector<Sl2>* lifts = nullptr) {
  const auto& spec = quotient.spec();
  if (spec.ambient != Ambient::sl2) throw InputError("radius_profile: SL2 only");
  if (grid.empty()) throw InputError("radius_profile: empty d0 grid");
  std::sort(grid.begin(), grid.end());
  if (grid.front() < 0) throw InputError("radius_profile: d0 must be >= 0");
  if (grid.back() > 24) throw ResourceError("radius_profile: d0 above 24 exceeds the enumeration cap");

  // Both lengths dominate 2 ln max|entry|, so the box of half-width e^{d0/2} holds the ball.
  const auto T = static_cast<std::int64_t>(std::floor(std::exp(grid.back() / 2) + 1e-9));
  constexpr double tol = 1e-9;
  std::vector<std::uint64_t> bucket(grid.size(), 0);
  auto bucket_of = [&](double l) -> std::optional<std::size_t> {
    auto it = std::lower_bound(grid.begin(), grid.end(), l - tol);
    if (it == grid.end()) return std::nullopt;
    return static_cast<std::size_t>(it - grid.begin());
  };

  std::vector<Sl2> own_lifts;
  if (method == ProfileMethod::conjugator_average && !lifts) {
    own_lifts = minimal_lifts(quotient);
    lifts = &own_lifts;
  }
  std::vector<Sl2> lift_inv;
  if (lifts)
    for (const auto& y : *lifts) lift_inv.push_back(inv(y));

  for_each_sl2_in_box(T, [&](const Sl2& delta) {
    auto b = bucket_of(sl2_length(delta, kind));
    if (!b) return;
    std::uint64_t hits = 0;
    if (method == ProfileMethod::conjugator_average) {
      for (std::size_t y = 0; y < lifts->size(); ++y) hits += in_subgroup(spec, mul(mul((*lifts)[y], delta), lift_inv[y]));
    } else {
      hits = fixed_point_count(quotient, delta.to_int_matrix());
    }
    bucket[*b] += hits;
  });

  RadiusProfile out{spec, quotient.index(), {}};
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    running += bucket[i];
    RadiusRow row;
    row.d0 = grid[i];
    row.total = running;
    row.averaged = static_cast<double>(running) / static_cast<double>(quotient.index());
    row.reference = std::exp(grid[i] / 2);
    row.ratio = row.averaged / row.reference;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace latlab

#endif
