// Exact integer / rational helpers shared by every module.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wordlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("zero denominator");
  return Rational(num, den);
}

// "num/den" always, even for integers, so CSV columns parse uniformly.
inline std::string rational_string(const Rational& q) {
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

// Accepts "7", "-3/4", "1/2".
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    return make_rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("not a rational: " + s);
  }
}

inline BigInt ipow(BigInt base, std::uint64_t e) {
  BigInt r = 1;
  while (e) {
    if (e & 1U) r *= base;
    base *= base;
    e >>= 1U;
  }
  return r;
}

inline BigInt ipow(std::uint64_t base, std::uint64_t e) { return ipow(BigInt(base), e); }

// floor(x^(1/k)) for x >= 0, k >= 1, by Newton iteration on integers.
inline BigInt iroot_floor(const BigInt& x, unsigned k) {
  if (x < 0) throw std::domain_error("iroot of negative");
  if (k == 0) throw std::domain_error("zeroth root");
  if (x < 2 || k == 1) return x;
  unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(x)) + 1;
  BigInt y = BigInt(1) << (bits / k + 1);  // over-estimate
  while (true) {
    BigInt yk1 = ipow(y, k - 1);
    BigInt next = ((k - 1) * y + x / yk1) / k;
    if (next >= y) break;
    y = next;
  }
  while (ipow(y, k) > x) --y;
  while (ipow(y + 1, k) <= x) ++y;
  return y;
}

inline BigInt iroot_ceil(const BigInt& x, unsigned k) {
  BigInt r = iroot_floor(x, k);
  return ipow(r, k) == x ? r : r + 1;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  if (b <= 0) throw std::domain_error("ceil_div by non-positive");
  if (a >= 0) return (a + b - 1) / b;
  return -((-a) / b);
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  if (b <= 0) throw std::domain_error("floor_div by non-positive");
  if (a >= 0) return a / b;
  return -ceil_div(-a, b);
}

// Rational exponent a/b with b > 0. Used for gamma and epsilon.
struct RationalExponent {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static RationalExponent from(const Rational& q) {
    BigInt n = numerator_of(q);
    BigInt d = denominator_of(q);
    if (n > BigInt(1) << 30 || n < -(BigInt(1) << 30) || d > BigInt(1) << 30)
      throw std::invalid_argument("exponent too large");
    return {n.convert_to<std::int64_t>(), d.convert_to<std::int64_t>()};
  }
  Rational value() const { return Rational(num, den); }
};

// Decides lhs_coeff * x^e  (cmp)  rhs_coeff * y^e for positive x, y and
// rational e = a/b >= 0 by raising everything to the b-th power.
// Returns sign of  lhs_coeff^b * x^a  -  rhs_coeff^b * y^a.
inline int compare_powers(const BigInt& lhs_coeff, const BigInt& x, const BigInt& rhs_coeff,
                          const BigInt& y, RationalExponent e) {
  if (e.num < 0) throw std::domain_error("negative exponent");
  auto b = static_cast<std::uint64_t>(e.den);
  auto a = static_cast<std::uint64_t>(e.num);
  BigInt l = ipow(lhs_coeff, b) * ipow(x, a);
  BigInt r = ipow(rhs_coeff, b) * ipow(y, a);
  return l < r ? -1 : (l > r ? 1 : 0);
}

// ceil(x^(a/b)) for x >= 0.
inline BigInt ceil_pow(const BigInt& x, RationalExponent e) {
  if (e.num < 0) throw std::domain_error("negative exponent");
  return iroot_ceil(ipow(x, static_cast<std::uint64_t>(e.num)), static_cast<unsigned>(e.den));
}

inline BigInt factorial(std::uint64_t n) {
  BigInt r = 1;
  for (std::uint64_t i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace wordlab
