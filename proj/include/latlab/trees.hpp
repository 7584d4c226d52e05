#ifndef LATLAB_TREES_HPP
#define LATLAB_TREES_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "latlab/errors.hpp"

namespace latlab {

// Geometry of the (q+1)-regular tree. Length is tree distance.

inline constexpr int kMaxTreeRadius = 12;

inline std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

struct TreeModel {
  int q = 2;

  explicit TreeModel(int branching) : q(branching) {
    if (q < 1) throw InputError("tree branching q must be >= 1");
  }

  int degree() const { return q + 1; }

  std::uint64_t sphere_size(int r) const {
    if (r < 0) return 0;
    if (r == 0) return 1;
    return static_cast<std::uint64_t>(q + 1) * ipow(static_cast<std::uint64_t>(q), r - 1);
  }

  std::uint64_t ball_size(int r) const {
    std::uint64_t s = 0;
    for (int k = 0; k <= r; ++k) s += sphere_size(k);
    return s;
  }
};

/// |B_{r1}(x) cap B_{r2}(y)| for d(x, y) = d. A vertex z attaches to the geodesic
/// [x, y] at distance t from x and sits at height h above it, so that
/// d(z, x) = t + h and d(z, y) = d - t + h. Vertices at height h >= 1 over a fixed
/// attachment point number branches * q^{h-1}, where branches is q+1 when d = 0,
/// q at the two endpoints, and q-1 in the interior.
inline std::uint64_t tree_convolution(int q, int r1, int r2, int d) {
  if (q < 1) throw InputError("tree_convolution: q must be >= 1");
  if (r1 < 0 || r2 < 0 || d < 0) throw InputError("tree_convolution: radii and distance must be >= 0");
  if (r1 > kMaxTreeRadius || r2 > kMaxTreeRadius) throw ResourceError("tree_convolution: radius above 12");
  std::uint64_t total = 0;
  for (int t = 0; t <= d; ++t) {
    int hmax = std::min(r1 - t, r2 - (d - t));
    if (hmax < 0) continue;
    total += 1;
    std::uint64_t branches = d == 0 ? q + 1 : (t == 0 || t == d) ? q : q - 1;
    for (int h = 1; h <= hmax; ++h) total += branches * ipow(static_cast<std::uint64_t>(q), h - 1);
  }
  return total;
}

struct ConvolutionRow {
  int d = 0;
  std::uint64_t count = 0;
  double bound = 0.0;  // q^{(2r - d)/2}
  double ratio = 0.0;
};

struct ConvolutionReport {
  int q = 0;
  int r = 0;
  double slack = 0.0;
  std::vector<ConvolutionRow> rows;
  double max_ratio = 0.0;
  bool within_slack = false;
};

using ConvolutionFn = std::uint64_t (*)(int, int, int, int);

/// Compares c_r(d) = |B_r(x) cap B_r(y)| with psi_{2r}(d) = q^{(2r-d)/2} for all d <= 2r.
inline ConvolutionReport check_convolution_lemma(int q, int r, double slack, ConvolutionFn conv = &tree_convolution) {
  if (r < 0 || r > kMaxTreeRadius) throw ResourceError("check_convolution_lemma: radius must lie in [0, 12]");
  ConvolutionReport rep{q, r, slack, {}, 0.0, false};
  for (int d = 0; d <= 2 * r; ++d) {
    ConvolutionRow row;
    row.d = d;
    row.count = conv(q, r, r, d);
    row.bound = std::pow(static_cast<double>(q), (2.0 * r - d) / 2.0);
    row.ratio = static_cast<double>(row.count) / row.bound;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  rep.within_slack = rep.max_ratio <= slack;
  return rep;
}

// Measured sup over q in {2,3,4}, r <= 12, d <= 2r of c_r(d) / q^{(2r-d)/2}. It is
// attained at d = 0 (the ball itself), where the ratio increases to (q+1)/(q-1), so
// q = 2 dominates with limit 3 (2.99951... at r = 12).
inline constexpr double kConvolutionConstant = 3.0;

// ---------------------------------------------------------------------------
// Rank-one dictionary between adjacency eigenvalues and p.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// lambda(p) = q^{1/p} + q^{1 - 1/p}; 2 sqrt(q) at p = 2, q + 1 at p = infinity.
inline double p_to_eigen(double p, int q) {
  if (q < 2) throw DomainError("p_to_eigen: q must be >= 2");
  if (!(p >= 2.0)) throw DomainError("p_to_eigen: p must be >= 2");
  if (std::isinf(p)) return q + 1.0;
  double qd = q;
  return std::pow(qd, 1.0 / p) + std::pow(qd, 1.0 - 1.0 / p);
}

/// Inverse of p_to_eigen on |lambda|: 2 inside the tempered range |lambda| <= 2 sqrt(q).
inline double eigen_to_p(double lambda, int q, double tol = 1e-9) {
  if (q < 2) throw DomainError("eigen_to_p: q must be >= 2");
  double a = std::abs(lambda);
  double qd = q;
  if (a > qd + 1.0 + tol) throw DomainError("eigen_to_p: |lambda| exceeds q + 1");
  if (a <= 2.0 * std::sqrt(qd)) return 2.0;
  a = std::min(a, qd + 1.0);
  double x = (a + std::sqrt(a * a - 4.0 * qd)) / 2.0;  // = q^{1 - 1/p}
  double denom = 1.0 - std::log(x) / std::log(qd);
  if (denom <= 1e-15) return kInfinity;
  return std::max(2.0, 1.0 / denom);
}

/// p attached to a non-backtracking eigenvalue of modulus |mu| = q^{1 - 1/p}.
inline double nb_modulus_to_p(double modulus, int q) {
  if (q < 2) throw DomainError("nb_modulus_to_p: q must be >= 2");
  double qd = q;
  if (modulus <= std::sqrt(qd)) return 2.0;
  double denom = 1.0 - std::log(modulus) / std::log(qd);
  if (denom <= 1e-15) return kInfinity;
  return std::max(2.0, 1.0 / denom);
}

/// Spherical function at tree distances 0..dmax for the eigenvalue lambda(p):
/// phi(0) = 1, phi(1) = lambda / (q+1), lambda phi(d) = q phi(d+1) + phi(d-1).
inline std::vector<double> spherical_function(double p, int q, int dmax) {
  if (dmax < 0) throw InputError("spherical_function: dmax must be >= 0");
  double lambda = p_to_eigen(p, q);
  std::vector<double> phi(static_cast<std::size_t>(dmax) + 1);
  phi[0] = 1.0;
  if (dmax >= 1) phi[1] = lambda / (q + 1.0);
  for (int d = 1; d < dmax; ++d) phi[d + 1] = (lambda * phi[d] - phi[d - 1]) / q;
  return phi;
}

inline double xi_tree(int d, double p, int q) {
  if (d < 0) throw InputError("xi_tree: d must be >= 0");
  return spherical_function(p, q, d)[static_cast<std::size_t>(d)];
}

// Largest |lambda phi(d) - q phi(d+1) - phi(d-1)| over the computed range.
inline double spherical_recursion_residual(const std::vector<double>& phi, double p, int q) {
  double lambda = p_to_eigen(p, q);
  double worst = 0.0;
  if (phi.size() >= 2) worst = std::abs(lambda * phi[0] - (q + 1.0) * phi[1]);
  for (std::size_t d = 1; d + 1 < phi.size(); ++d)
    worst = std::max(worst, std::abs(lambda * phi[d] - q * phi[d + 1] - phi[d - 1]));
  return worst;
}

}  // namespace latlab

#endif
