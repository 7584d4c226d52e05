#ifndef LATLAB_INTEGER_HPP
#define LATLAB_INTEGER_HPP

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace latlab {

using BigInt = boost::multiprecision::cpp_int;

// Exact integer: checked 64-bit arithmetic that promotes to BigInt on overflow
// and demotes back whenever a result fits in 64 bits again.
class Integer {
 public:
  Integer() = default;
  Integer(std::int64_t v) : rep_(v) {}  // NOLINT(google-explicit-constructor)
  Integer(int v) : rep_(static_cast<std::int64_t>(v)) {}  // NOLINT
  explicit Integer(const BigInt& v) { assign(v); }

  bool is_small() const noexcept { return std::holds_alternative<std::int64_t>(rep_); }
  std::int64_t small() const { return std::get<std::int64_t>(rep_); }

  BigInt big() const {
    if (is_small()) return BigInt(small());
    return std::get<BigInt>(rep_);
  }

  double to_double() const {
    if (is_small()) return static_cast<double>(small());
    return std::get<BigInt>(rep_).convert_to<double>();
  }

  std::string str() const {
    if (is_small()) return std::to_string(small());
    return std::get<BigInt>(rep_).str();
  }

  // Representative in [0, modulus).
  std::int64_t mod(std::int64_t modulus) const {
    if (is_small()) {
      std::int64_t r = small() % modulus;
      return r < 0 ? r + modulus : r;
    }
    BigInt r = std::get<BigInt>(rep_) % modulus;
    if (r < 0) r += modulus;
    return r.convert_to<std::int64_t>();
  }

  friend Integer operator+(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) {
      std::int64_t r;
      if (!__builtin_add_overflow(a.small(), b.small(), &r)) return Integer(r);
    }
    return Integer(BigInt(a.big() + b.big()));
  }

  friend Integer operator-(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) {
      std::int64_t r;
      if (!__builtin_sub_overflow(a.small(), b.small(), &r)) return Integer(r);
    }
    return Integer(BigInt(a.big() - b.big()));
  }

  friend Integer operator*(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) {
      std::int64_t r;
      if (!__builtin_mul_overflow(a.small(), b.small(), &r)) return Integer(r);
    }
    return Integer(BigInt(a.big() * b.big()));
  }

  friend Integer operator-(const Integer& a) { return Integer(0) - a; }

  Integer& operator+=(const Integer& o) { return *this = *this + o; }
  Integer& operator-=(const Integer& o) { return *this = *this - o; }
  Integer& operator*=(const Integer& o) { return *this = *this * o; }

  friend bool operator==(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) return a.small() == b.small();
    return a.big() == b.big();
  }

  friend bool operator<(const Integer& a, const Integer& b) {
    if (a.is_small() && b.is_small()) return a.small() < b.small();
    return a.big() < b.big();
  }

  friend Integer abs(const Integer& a) { return a < Integer(0) ? -a : a; }

  friend std::ostream& operator<<(std::ostream& os, const Integer& v) { return os << v.str(); }

 private:
  void assign(const BigInt& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
      rep_ = v.convert_to<std::int64_t>();
    else
      rep_ = v;
  }

  std::variant<std::int64_t, BigInt> rep_{std::int64_t{0}};
};

}  // namespace latlab

#endif
