#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace latticetodd {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

using IVec = std::vector<Int>;
using QVec = std::vector<Rational>;

inline Int num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Int den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Int gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }
inline Int lcm(const Int& a, const Int& b) { return boost::multiprecision::lcm(a, b); }

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

/// Largest integer <= q.
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

inline Int floor_rat(const Rational& q) { return floor_div(num(q), den(q)); }
inline Int ceil_rat(const Rational& q) { return -floor_rat(-q); }

inline bool is_integer(const Rational& q) { return den(q) == 1; }

inline double to_double(const Rational& q) { return static_cast<double>(q); }

inline std::string to_string(const Int& a) { return a.str(); }

/// Reduced "p" or "p/q" form, q > 0.
inline std::string to_string(const Rational& q) {
  if (is_integer(q)) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

/// Parses "p" or "p/q"; exact, no floating-point round trip.
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(Int(s));
  Int p(s.substr(0, slash)), q(s.substr(slash + 1));
  if (q == 0) throw std::invalid_argument("rational with zero denominator: " + s);
  return Rational(p, q);
}

inline Int ipow(Int base, unsigned e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline Rational qpow(const Rational& base, int e) {
  if (e < 0) {
    if (base == 0) throw std::domain_error("qpow: 0^negative");
    return Rational(1) / qpow(base, -e);
  }
  Rational r = 1, b = base;
  unsigned u = static_cast<unsigned>(e);
  while (u) {
    if (u & 1) r *= b;
    b *= b;
    u >>= 1;
  }
  return r;
}

inline Rational factorial(unsigned n) {
  Int r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return Rational(r);
}

inline void check_finite(const Complex& z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::domain_error("non-finite complex value escaped an operation");
}

/// exp(2*pi*i*gamma) for a rational rotation number.
inline Complex root_of_unity(const Rational& gamma) {
  double g = to_double(gamma);
  double ang = 6.283185307179586476925286766559 * g;
  Complex z(std::cos(ang), std::sin(ang));
  check_finite(z);
  return z;
}

// Small coefficient-field shims so series/operator templates work over both
// exact rationals and doubles.
template <class C> struct field_traits;

template <> struct field_traits<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x) { return x == 0; }
  static Rational from_rational(const Rational& q) { return q; }
};

template <> struct field_traits<Complex> {
  static Complex zero() { return Complex(0.0, 0.0); }
  static Complex one() { return Complex(1.0, 0.0); }
  static bool is_zero(const Complex& x) { return x == Complex(0.0, 0.0); }
  static Complex from_rational(const Rational& q) { return Complex(to_double(q), 0.0); }
};

}  // namespace latticetodd
