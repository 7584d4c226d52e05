#ifndef LATLAB_MATGROUPS_HPP
#define LATLAB_MATGROUPS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "latlab/errors.hpp"
#include "latlab/integer.hpp"

namespace latlab {

enum class Ambient { sl2, sl3 };

inline int dimension(Ambient a) { return a == Ambient::sl2 ? 2 : 3; }

inline Ambient ambient_for(int n) {
  if (n == 2) return Ambient::sl2;
  if (n == 3) return Ambient::sl3;
  throw InputError("only SL2 and SL3 are supported, got n=" + std::to_string(n));
}

/// Exact element of SL_n(Z), n in {2, 3}. The determinant is checked on construction.
class IntMatrix {
 public:
  IntMatrix(int n, const std::vector<Integer>& entries) : n_(n) {
    if (n != 2 && n != 3) throw InputError("IntMatrix dimension must be 2 or 3");
    if (entries.size() != static_cast<std::size_t>(n * n))
      throw InputError("IntMatrix expects " + std::to_string(n * n) + " entries");
    std::copy(entries.begin(), entries.end(), e_.begin());
    if (!(det() == Integer(1))) throw InputError("IntMatrix determinant is " + det().str() + ", expected 1");
  }

  IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
      : IntMatrix(static_cast<int>(rows.size()), flatten(rows)) {}

  static IntMatrix identity(int n) {
    std::array<Integer, 9> e{};
    for (int i = 0; i < n; ++i) e[i * n + i] = 1;
    return IntMatrix(n, e, Unchecked{});
  }

  int dim() const noexcept { return n_; }
  const Integer& operator()(int i, int j) const { return e_[i * n_ + j]; }

  Integer det() const {
    const auto& m = *this;
    if (n_ == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }

  // det = 1, so the inverse is the adjugate.
  IntMatrix inverse() const {
    const auto& m = *this;
    std::array<Integer, 9> r{};
    if (n_ == 2) {
      r[0] = m(1, 1);
      r[1] = -m(0, 1);
      r[2] = -m(1, 0);
      r[3] = m(0, 0);
    } else {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
          r[i * 3 + j] = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
        }
      }
    }
    return IntMatrix(n_, r, Unchecked{});
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.n_ != b.n_) throw InputError("IntMatrix dimension mismatch in product");
    int n = a.n_;
    std::array<Integer, 9> r{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Integer s = 0;
        for (int k = 0; k < n; ++k) s += a(i, k) * b(k, j);
        r[i * n + j] = s;
      }
    return IntMatrix(n, r, Unchecked{});
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_ * a.n_; ++i)
      if (!(a.e_[i] == b.e_[i])) return false;
    return true;
  }

  Eigen::MatrixXd to_real() const {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).to_double();
    return m;
  }

  // Largest absolute entry (the sup-norm used by the counting module).
  Integer max_abs() const {
    Integer best = 0;
    for (int i = 0; i < n_ * n_; ++i) best = std::max(best, abs(e_[i]));
    return best;
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (int i = 0; i < n_; ++i) {
      os << (i ? ",[" : "[");
      for (int j = 0; j < n_; ++j) os << (j ? "," : "") << (*this)(i, j);
      os << ']';
    }
    os << ']';
    return os.str();
  }

 private:
  struct Unchecked {};
  IntMatrix(int n, const std::array<Integer, 9>& e, Unchecked) : n_(n), e_(e) {}

  static std::vector<Integer> flatten(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
    std::vector<Integer> out;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) throw InputError("IntMatrix must be square");
      for (auto v : r) out.emplace_back(v);
    }
    return out;
  }

  int n_;
  std::array<Integer, 9> e_{};
};

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

/// Element of SL_n(Z/N) with residues in [0, N).
class ModMatrix {
 public:
  ModMatrix(int n, std::int64_t modulus, const std::array<std::int64_t, 9>& entries)
      : n_(n), modulus_(modulus) {
    if (n != 2 && n != 3) throw InputError("ModMatrix dimension must be 2 or 3");
    if (modulus < 1) throw InputError("modulus must be >= 1");
    for (int i = 0; i < n * n; ++i) e_[i] = floor_mod(entries[i], modulus);
    if (det() != floor_mod(1, modulus)) throw InputError("ModMatrix determinant is not 1 mod N");
  }

  static ModMatrix identity(int n, std::int64_t modulus) {
    std::array<std::int64_t, 9> e{};
    for (int i = 0; i < n; ++i) e[i * n + i] = floor_mod(1, modulus);
    return ModMatrix(n, modulus, e, Unchecked{});
  }

  // Row-major base-N digits, most significant first; key order is lexicographic entry order.
  static ModMatrix from_key(int n, std::int64_t modulus, std::uint64_t key) {
    std::array<std::int64_t, 9> e{};
    auto base = static_cast<std::uint64_t>(modulus);
    for (int i = n * n - 1; i >= 0; --i) {
      e[i] = static_cast<std::int64_t>(key % base);
      key /= base;
    }
    return ModMatrix(n, modulus, e, Unchecked{});
  }

  std::uint64_t key() const {
    std::uint64_t k = 0;
    for (int i = 0; i < n_ * n_; ++i) k = k * static_cast<std::uint64_t>(modulus_) + static_cast<std::uint64_t>(e_[i]);
    return k;
  }

  int dim() const noexcept { return n_; }
  std::int64_t modulus() const noexcept { return modulus_; }
  std::int64_t operator()(int i, int j) const { return e_[i * n_ + j]; }
  const std::array<std::int64_t, 9>& entries() const noexcept { return e_; }

  std::int64_t det() const {
    const auto& m = *this;
    __int128 d;
    if (n_ == 2) {
      d = static_cast<__int128>(m(0, 0)) * m(1, 1) - static_cast<__int128>(m(0, 1)) * m(1, 0);
    } else {
      auto c = [&](int r0, int r1, int c0, int c1) {
        return static_cast<__int128>(m(r0, c0)) * m(r1, c1) - static_cast<__int128>(m(r0, c1)) * m(r1, c0);
      };
      d = m(0, 0) * (c(1, 2, 1, 2) % modulus_) - m(0, 1) * (c(1, 2, 0, 2) % modulus_) +
          m(0, 2) * (c(1, 2, 0, 1) % modulus_);
    }
    auto r = static_cast<std::int64_t>(d % modulus_);
    return r < 0 ? r + modulus_ : r;
  }

  friend ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) {
    if (a.n_ != b.n_ || a.modulus_ != b.modulus_) throw InputError("ModMatrix shape/modulus mismatch");
    int n = a.n_;
    std::array<std::int64_t, 9> r{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        __int128 s = 0;
        for (int k = 0; k < n; ++k) s += static_cast<__int128>(a(i, k)) * b(k, j);
        r[i * n + j] = static_cast<std::int64_t>(s % a.modulus_);
      }
    return ModMatrix(n, a.modulus_, r, Unchecked{});
  }

  friend bool operator==(const ModMatrix& a, const ModMatrix& b) {
    return a.n_ == b.n_ && a.modulus_ == b.modulus_ && a.e_ == b.e_;
  }

  bool is_identity() const { return *this == identity(n_, modulus_); }

 private:
  struct Unchecked {};
  ModMatrix(int n, std::int64_t modulus, const std::array<std::int64_t, 9>& e, Unchecked)
      : n_(n), modulus_(modulus), e_(e) {}

  int n_;
  std::int64_t modulus_;
  std::array<std::int64_t, 9> e_{};
};

inline ModMatrix reduce_mod(const IntMatrix& g, std::int64_t modulus) {
  if (modulus < 1) throw InputError("reduce_mod: level must be >= 1");
  std::array<std::int64_t, 9> e{};
  int n = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e[i * n + j] = g(i, j).mod(modulus);
  return ModMatrix(n, modulus, e);
}

enum class SubgroupKind { principal, gamma0, gamma2 };

struct SubgroupSpec {
  Ambient ambient = Ambient::sl2;
  SubgroupKind kind = SubgroupKind::principal;
  std::int64_t level = 1;

  static SubgroupSpec principal(std::int64_t n, Ambient a = Ambient::sl2) { return make(a, SubgroupKind::principal, n); }
  static SubgroupSpec gamma0(std::int64_t n, Ambient a = Ambient::sl2) { return make(a, SubgroupKind::gamma0, n); }
  static SubgroupSpec gamma2(std::int64_t n) { return make(Ambient::sl3, SubgroupKind::gamma2, n); }

  static SubgroupSpec make(Ambient a, SubgroupKind k, std::int64_t n) {
    SubgroupSpec s{a, k, n};
    s.validate();
    return s;
  }

  void validate() const {
    if (level < 1) throw InputError("subgroup level must be >= 1");
    if (kind == SubgroupKind::gamma2 && ambient != Ambient::sl3) throw InputError("Gamma2(N) is only defined in SL3");
  }

  int dim() const { return dimension(ambient); }

  // (row, col, required residue) constraints defining the subgroup mod N.
  std::vector<std::array<int, 3>> pattern() const {
    int n = dim();
    std::vector<std::array<int, 3>> p;
    switch (kind) {
      case SubgroupKind::principal:
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) p.push_back({i, j, i == j ? 1 : 0});
        break;
      case SubgroupKind::gamma0:
        for (int j = 0; j + 1 < n; ++j) p.push_back({n - 1, j, 0});
        break;
      case SubgroupKind::gamma2:
        p = {{1, 0, 0}, {2, 0, 0}, {2, 1, 0}};
        break;
    }
    return p;
  }

  std::string name() const {
    std::string k = kind == SubgroupKind::principal ? "Principal" : kind == SubgroupKind::gamma0 ? "Gamma0" : "Gamma2";
    return k + "(" + std::to_string(level) + ") in " + (ambient == Ambient::sl2 ? "SL2" : "SL3");
  }

  friend bool operator==(const SubgroupSpec&, const SubgroupSpec&) = default;
};

inline bool contains_residue(const SubgroupSpec& spec, const ModMatrix& g) {
  if (g.dim() != spec.dim()) throw InputError("dimension mismatch between subgroup and matrix");
  for (const auto& [i, j, target] : spec.pattern())
    if (g(i, j) != floor_mod(target, spec.level)) return false;
  return true;
}

inline bool subgroup_contains(const SubgroupSpec& spec, const IntMatrix& g) {
  if (g.dim() != spec.dim())
    throw InputError("subgroup_contains: " + spec.name() + " vs " + std::to_string(g.dim()) + "x" +
                     std::to_string(g.dim()) + " matrix");
  return contains_residue(spec, reduce_mod(g, spec.level));
}

/// Standard generators: S and T for SL2, elementary e_ij(+-1) for SL3.
inline std::vector<IntMatrix> standard_generators(Ambient a) {
  if (a == Ambient::sl2) return {IntMatrix{{0, -1}, {1, 0}}, IntMatrix{{1, 1}, {0, 1}}};
  std::vector<IntMatrix> gens;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      for (int s : {1, -1}) {
        std::vector<Integer> e(9, 0);
        for (int k = 0; k < 3; ++k) e[k * 3 + k] = 1;
        e[i * 3 + j] = s;
        gens.emplace_back(3, e);
      }
    }
  return gens;
}

namespace detail {

// Canonical labels for right cosets Gamma_N y, computed from y mod N.
class CosetKeyer {
 public:
  explicit CosetKeyer(const SubgroupSpec& spec) : spec_(spec), n_(spec.dim()), mod_(spec.level) {
    long double span = std::pow(static_cast<long double>(mod_), n_ * n_);
    if (span > 1.8e19L) throw ResourceError("level too large for 64-bit coset keys");
    if (spec.kind == SubgroupKind::gamma0) {
      mode_ = Mode::projective;
      for (std::int64_t u = 1; u <= mod_; ++u)
        if (std::gcd(u % mod_, mod_) == 1) units_.push_back(u % mod_);
    } else if (spec.kind == SubgroupKind::gamma2) {
      mode_ = Mode::orbit;
      build_stabilizer();
    }
  }

  std::uint64_t key_of(const ModMatrix& y) const {
    switch (mode_) {
      case Mode::matrix:
        return y.key();
      case Mode::projective: {
        std::array<std::int64_t, 3> v{};
        for (int j = 0; j < n_; ++j) v[j] = y(n_ - 1, j);
        return projective_key(v);
      }
      case Mode::orbit:
        break;
    }
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (const auto& h : stabilizer_) best = std::min(best, (h * y).key());
    return best;
  }

  std::uint64_t act(std::uint64_t key, const ModMatrix& g) const {
    if (mode_ == Mode::projective) {
      auto v = decode_point(key);
      std::array<std::int64_t, 3> w{};
      for (int j = 0; j < n_; ++j) {
        __int128 s = 0;
        for (int k = 0; k < n_; ++k) s += static_cast<__int128>(v[k]) * g(k, j);
        w[j] = static_cast<std::int64_t>(s % mod_);
      }
      return projective_key(w);
    }
    ModMatrix y = ModMatrix::from_key(n_, mod_, key) * g;
    return mode_ == Mode::matrix ? y.key() : key_of(y);
  }

  std::vector<std::int64_t> label(std::uint64_t key) const {
    if (mode_ == Mode::projective) {
      auto v = decode_point(key);
      return {v.begin(), v.begin() + n_};
    }
    auto m = ModMatrix::from_key(n_, mod_, key);
    return {m.entries().begin(), m.entries().begin() + n_ * n_};
  }

  bool projective() const { return mode_ == Mode::projective; }

 private:
  enum class Mode { matrix, projective, orbit };

  std::uint64_t encode_point(const std::array<std::int64_t, 3>& v) const {
    std::uint64_t k = 0;
    for (int j = 0; j < n_; ++j) k = k * static_cast<std::uint64_t>(mod_) + static_cast<std::uint64_t>(v[j]);
    return k;
  }

  std::array<std::int64_t, 3> decode_point(std::uint64_t key) const {
    std::array<std::int64_t, 3> v{};
    for (int j = n_ - 1; j >= 0; --j) {
      v[j] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(mod_));
      key /= static_cast<std::uint64_t>(mod_);
    }
    return v;
  }

  // Least representative of the projective class {u v : u a unit mod N}.
  std::uint64_t projective_key(const std::array<std::int64_t, 3>& v) const {
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (auto u : units_) {
      std::array<std::int64_t, 3> w{};
      for (int j = 0; j < n_; ++j) w[j] = static_cast<std::int64_t>((static_cast<__int128>(u) * v[j]) % mod_);
      best = std::min(best, encode_point(w));
    }
    return best;
  }

  // Image of the subgroup in SL_n(Z/N), enumerated over its free entries.
  void build_stabilizer() {
    auto pattern = spec_.pattern();
    std::array<bool, 9> fixed{};
    std::array<std::int64_t, 9> base{};
    for (const auto& [i, j, t] : pattern) {
      fixed[i * n_ + j] = true;
      base[i * n_ + j] = floor_mod(t, mod_);
    }
    std::vector<int> free;
    for (int i = 0; i < n_ * n_; ++i)
      if (!fixed[i]) free.push_back(i);
    long double total = std::pow(static_cast<long double>(mod_), free.size());
    if (total > 5e7L) throw ResourceError("subgroup image too large to enumerate at level " + std::to_string(mod_));
    std::vector<std::int64_t> digits(free.size(), 0);
    while (true) {
      auto e = base;
      for (std::size_t f = 0; f < free.size(); ++f) e[free[f]] = digits[f];
      try {
        stabilizer_.emplace_back(n_, mod_, e);
      } catch (const InputError&) {
      }
      std::size_t f = 0;
      while (f < digits.size() && ++digits[f] == mod_) digits[f++] = 0;
      if (f == digits.size()) break;
    }
  }

  SubgroupSpec spec_;
  int n_;
  std::int64_t mod_;
  Mode mode_ = Mode::matrix;
  std::vector<std::int64_t> units_;
  std::vector<ModMatrix> stabilizer_;
};

}  // namespace detail

/// The finite quotient Gamma_N \ Gamma_1 with the right action of Gamma_1.
///
/// Cosets are numbered in BFS order from the identity coset (index 0). The action
/// table stores coset * generator, i.e. Gamma_N y -> Gamma_N y g; composing table
/// permutations therefore follows the right-action law perm(gh) = perm(h) o perm(g).
/// Immutable after construction.
class QuotientSpace {
 public:
  QuotientSpace(const SubgroupSpec& spec, std::size_t cap)
      : spec_(spec), keyer_(spec), generators_(standard_generators(spec.ambient)) {
    spec.validate();
    for (const auto& g : generators_) gen_mod_.push_back(reduce_mod(g, spec.level));
    std::uint64_t start = keyer_.key_of(ModMatrix::identity(spec.dim(), spec.level));
    keys_.push_back(start);
    lookup_.emplace(start, 0);
    for (std::size_t c = 0; c < keys_.size(); ++c) {
      for (const auto& g : gen_mod_) {
        std::uint64_t k = keyer_.act(keys_[c], g);
        auto [it, inserted] = lookup_.try_emplace(k, static_cast<std::uint32_t>(keys_.size()));
        if (inserted) {
          if (keys_.size() >= cap)
            throw ResourceError("enumerate_quotient: " + spec.name() + " exceeds the cap of " + std::to_string(cap) +
                                " cosets");
          keys_.push_back(k);
        }
        table_.push_back(it->second);
      }
    }
  }

  const SubgroupSpec& spec() const noexcept { return spec_; }
  std::size_t index() const noexcept { return keys_.size(); }
  const std::vector<IntMatrix>& generators() const noexcept { return generators_; }
  std::size_t generator_count() const noexcept { return generators_.size(); }

  std::uint32_t image(std::uint32_t coset, std::size_t generator) const {
    return table_[coset * generators_.size() + generator];
  }

  std::uint32_t coset_of(const ModMatrix& y) const { return find(keyer_.key_of(y)); }
  std::uint32_t coset_of(const IntMatrix& y) const { return coset_of(reduce_mod(y, spec_.level)); }

  std::uint32_t act(std::uint32_t coset, const ModMatrix& g) const { return find(keyer_.act(keys_[coset], g)); }
  std::uint32_t act(std::uint32_t coset, const IntMatrix& g) const { return act(coset, reduce_mod(g, spec_.level)); }

  // x -> x g for every coset x.
  std::vector<std::uint32_t> permutation(const IntMatrix& g) const {
    ModMatrix gm = reduce_mod(g, spec_.level);
    std::vector<std::uint32_t> p(index());
    for (std::uint32_t c = 0; c < index(); ++c) p[c] = act(c, gm);
    return p;
  }

  // Canonical label: residues of the least representative matrix, or the projective point for Gamma0.
  std::vector<std::int64_t> label(std::uint32_t coset) const { return keyer_.label(keys_[coset]); }
  bool projective_labels() const { return keyer_.projective(); }

  void write_csv(std::ostream& os) const {
    os << "coset_id,generator_id,image_coset_id\n";
    for (std::uint32_t c = 0; c < index(); ++c)
      for (std::size_t g = 0; g < generators_.size(); ++g) os << c << ',' << g << ',' << image(c, g) << '\n';
  }

 private:
  std::uint32_t find(std::uint64_t key) const {
    auto it = lookup_.find(key);
    if (it == lookup_.end()) throw InputError("matrix does not reduce to a coset of " + spec_.name());
    return it->second;
  }

  SubgroupSpec spec_;
  detail::CosetKeyer keyer_;
  std::vector<IntMatrix> generators_;
  std::vector<ModMatrix> gen_mod_;
  std::vector<std::uint64_t> keys_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
  std::vector<std::uint32_t> table_;
};

inline constexpr std::size_t kDefaultCosetCap = 10'000'000;

inline QuotientSpace enumerate_quotient(const SubgroupSpec& spec, std::size_t cap = kDefaultCosetCap) {
  return QuotientSpace(spec, cap);
}

}  // namespace latlab

#endif
