#ifndef LATLAB_CARTAN_HPP
#define LATLAB_CARTAN_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "latlab/errors.hpp"
#include "latlab/parallel.hpp"

namespace latlab {

// Geometry of SL_n(R) with the Archimedean convention q = e: lengths are natural logs.

struct CartanData {
  int n = 0;
  Eigen::VectorXd sigma;  // singular values, descending, product 1
  double l = 0.0;         // sum_i (n-1-2i) ln sigma_i
  double l_tilde = 0.0;   // ln of the spectral norm
};

struct IwasawaData {
  int n = 0;
  Eigen::VectorXd H;  // ln of the diagonal of the triangular factor
};

struct LengthComparison {
  double l = 0.0;
  double l_tilde = 0.0;
  std::optional<double> ratio;  // empty when l_tilde == 0
};

namespace detail {

inline void require_sl(const Eigen::MatrixXd& g, const char* who) {
  if (g.rows() != g.cols() || g.rows() < 2) throw InputError(std::string(who) + ": expected a square matrix");
  if (!g.allFinite()) throw InputError(std::string(who) + ": non-finite entries");
  double det = g.determinant();
  if (std::abs(det - 1.0) >= 1e-6) throw InputError(std::string(who) + ": |det - 1| = " + std::to_string(std::abs(det - 1.0)));
}

// Weights (n-1-2i) of the modular character in the descending basis.
inline double modular_weight(int n, int i) { return static_cast<double>(n - 1 - 2 * i); }

inline double length_from_log_profile(const Eigen::VectorXd& logs) {
  int n = static_cast<int>(logs.size());
  double l = 0.0;
  for (int i = 0; i < n; ++i) l += modular_weight(n, i) * logs[i];
  return l;
}

}  // namespace detail

inline CartanData cartan_decompose(const Eigen::MatrixXd& g) {
  detail::require_sl(g, "cartan_decompose");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  CartanData out;
  out.n = static_cast<int>(g.rows());
  out.sigma = svd.singularValues();  // Eigen returns them sorted descending
  Eigen::VectorXd logs = out.sigma.array().log();
  out.l = detail::length_from_log_profile(logs);
  out.l_tilde = logs[0];
  return out;
}

inline double cartan_length(const Eigen::MatrixXd& g) { return cartan_decompose(g).l; }

inline LengthComparison length_compare(const Eigen::MatrixXd& g) {
  auto c = cartan_decompose(g);
  LengthComparison out{c.l, c.l_tilde, std::nullopt};
  if (std::abs(c.l_tilde) > 1e-15) out.ratio = c.l / c.l_tilde;
  return out;
}

inline bool check_subadditivity(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2) {
  return cartan_length(g1 * g2) <= cartan_length(g1) + cartan_length(g2) + 1e-6;
}

// g = k a n with positive diagonal a; H = ln diag(a).
template <typename Matrix>
Eigen::VectorXd iwasawa_log_diagonal(const Matrix& g) {
  Eigen::HouseholderQR<Matrix> qr(g);
  const auto& r = qr.matrixQR();
  int n = static_cast<int>(g.rows());
  double scale = g.cwiseAbs().maxCoeff();
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i) {
    double d = std::abs(r(i, i));
    if (!(d > 1e-13 * scale)) throw NumericalError("Iwasawa decomposition: rank-deficient QR");
    h[i] = std::log(d);
  }
  return h;
}

inline IwasawaData iwasawa_decompose(const Eigen::MatrixXd& g) {
  detail::require_sl(g, "iwasawa_decompose");
  return IwasawaData{static_cast<int>(g.rows()), iwasawa_log_diagonal(g)};
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs of
/// diag(R) folded into Q.
template <int Dim, typename Rng>
Eigen::Matrix<double, Dim, Dim> haar_orthogonal(Rng& rng, int n = Dim) {
  std::normal_distribution<double> normal;
  Eigen::Matrix<double, Dim, Dim> z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::Matrix<double, Dim, Dim>> qr(z);
  Eigen::Matrix<double, Dim, Dim> q = qr.householderQ();
  for (int j = 0; j < n; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

/// Random element of SL_n(R): Gaussian entries, a row sign flip if det < 0, then
/// scaled by det^{-1/n}.
template <typename Rng>
Eigen::MatrixXd random_sl(int n, Rng& rng, double spread = 1.0) {
  std::normal_distribution<double> normal(0.0, spread);
  while (true) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
    double det = g.determinant();
    if (std::abs(det) < 1e-3) continue;
    if (det < 0) {
      g.row(0) = -g.row(0);
      det = -det;
    }
    return g / std::pow(det, 1.0 / n);
  }
}

struct XiEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

namespace detail {

inline constexpr std::size_t kXiChunk = 1u << 15;

template <int Dim>
XiEstimate xi_p_fixed(const Eigen::MatrixXd& g_dyn, double p, std::size_t samples, std::uint64_t seed, unsigned threads) {
  using Mat = Eigen::Matrix<double, Dim, Dim>;
  const Mat g = g_dyn;
  const double exponent = std::isinf(p) ? 0.0 : -1.0 / p;
  const std::size_t chunks = (samples + kXiChunk - 1) / kXiChunk;
  std::vector<double> sums(chunks, 0.0), squares(chunks, 0.0);
  parallel_chunks(chunks, chunks, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      std::mt19937_64 rng(mix_seed(seed, c));
      std::size_t count = std::min(kXiChunk, samples - c * kXiChunk);
      double s = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        Mat k = haar_orthogonal<Dim>(rng);
        Eigen::VectorXd h = iwasawa_log_diagonal<Mat>(g * k);
        double v = std::exp(exponent * length_from_log_profile(h));
        s += v;
        s2 += v * v;
      }
      sums[c] = s;
      squares[c] = s2;
    }
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sums[c];
    s2 += squares[c];
  }
  double n = static_cast<double>(samples);
  double mean = s / n;
  double var = std::max(0.0, s2 / n - mean * mean) * n / (n - 1.0);
  return {mean, std::sqrt(var / n), samples};
}

}  // namespace detail

/// Monte-Carlo estimate of the Harish-Chandra function
///   Xi_p(g) = int_K delta(g k)^{-1/p} dk,
/// with k Haar on O(n) and delta read off the Iwasawa A-part of g k. p = infinity
/// gives the constant integrand 1. Samples are drawn in fixed-size chunks with
/// per-chunk seeds, so the result is bit-identical for any thread count.
inline XiEstimate xi_p_montecarlo(const Eigen::MatrixXd& g, double p, std::size_t samples, std::uint64_t seed,
                                  unsigned threads = 1) {
  detail::require_sl(g, "xi_p_montecarlo");
  if (!(p >= 2.0)) throw DomainError("xi_p_montecarlo: p must lie in [2, inf]");
  if (samples < 1000) throw InputError("xi_p_montecarlo: need at least 1000 samples");
  switch (g.rows()) {
    case 2:
      return detail::xi_p_fixed<2>(g, p, samples, seed, threads);
    case 3:
      return detail::xi_p_fixed<3>(g, p, samples, seed, threads);
    default:
      throw InputError("xi_p_montecarlo: only n = 2, 3 supported");
  }
}

// diag(e^{t/2}, e^{-t/2}): the SL2 element of length t.
inline Eigen::MatrixXd sl2_translation(double t) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = std::exp(t / 2);
  a(1, 1) = std::exp(-t / 2);
  return a;
}

inline Eigen::MatrixXd diagonal_exp(std::initializer_list<double> logs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(logs.size()));
  int i = 0;
  for (double x : logs) v[i++] = std::exp(x);
  return v.asDiagonal();
}

// Reference envelope for Xi_2(a_t): [e^{-t/2}, 2 (1 + t) e^{-t/2}].
inline double xi2_lower_bound(double t) { return std::exp(-t / 2); }
inline double xi2_upper_bound(double t) { return 2.0 * (1.0 + t) * std::exp(-t / 2); }

}  // namespace latlab

#endif
