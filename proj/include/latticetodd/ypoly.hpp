#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cassert>

namespace latticetodd {

/// Polynomial in the Hirzebruch parameter y; trailing zeros trimmed so the
/// zero polynomial has an empty coefficient list.
template <class K>
struct YPoly {
  std::vector<K> c;  // c[i] multiplies y^i

  YPoly() = default;
  explicit YPoly(K k) : c{std::move(k)} { trim(); }
  static YPoly zero() { return YPoly(); }
  static YPoly one() { return YPoly(field_traits<K>::one()); }
  static YPoly constant(const K& k) { return YPoly(k); }
  static YPoly y() {
    YPoly p;
    p.c = {field_traits<K>::zero(), field_traits<K>::one()};
    return p;
  }

  void trim() {
    while (!c.empty() && field_traits<K>::is_zero(c.back())) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  K coeff(std::size_t i) const { return i < c.size() ? c[i] : field_traits<K>::zero(); }

  bool operator==(const YPoly& o) const { return c == o.c; }

  YPoly operator+(const YPoly& o) const {
    YPoly r;
    r.c.resize(std::max(c.size(), o.c.size()), field_traits<K>::zero());
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    r.trim();
    return r;
  }
  YPoly operator-() const {
    YPoly r(*this);
    for (K& k : r.c) k = -k;
    return r;
  }
  YPoly operator-(const YPoly& o) const { return *this + (-o); }
  YPoly operator*(const YPoly& o) const {
    if (is_zero() || o.is_zero()) return YPoly();
    YPoly r;
    r.c.assign(c.size() + o.c.size() - 1, field_traits<K>::zero());
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
  }
  YPoly& operator+=(const YPoly& o) { return *this = *this + o; }
  YPoly& operator-=(const YPoly& o) { return *this = *this - o; }
  YPoly& operator*=(const YPoly& o) { return *this = *this * o; }

  YPoly scaled(const K& k) const {
    YPoly r(*this);
    for (K& x : r.c) x *= k;
    r.trim();
    return r;
  }

  K eval(const K& y) const {
    K acc = field_traits<K>::zero();
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * y + c[i];
    return acc;
  }

  /// (1+y)^e, e >= 0.
  static YPoly one_plus_y_pow(unsigned e) {
    YPoly b;
    b.c = {field_traits<K>::one(), field_traits<K>::one()};
    YPoly r = one();
    for (unsigned i = 0; i < e; ++i) r *= b;
    return r;
  }

  /// Exact division by (1+y)^e; throws when not divisible.
  YPoly divide_by_one_plus_y(unsigned e) const {
    YPoly r(*this);
    for (unsigned s = 0; s < e; ++s) {
      if (r.is_zero()) continue;
      // (y+1) q(y) + rem = r(y):  q_{d-1} = c_d,  q_{i-1} = c_i - q_i,  rem = c_0 - q_0
      std::size_t d = r.c.size() - 1;
      std::vector<K> q(d, field_traits<K>::zero());
      if (d > 0) q[d - 1] = r.c[d];
      for (std::size_t i = d; i-- > 1;) q[i - 1] = r.c[i] - q[i];
      K rem = r.c[0] - (q.empty() ? field_traits<K>::zero() : q[0]);
      if (d == 0) rem = r.c[0];
      if (!field_traits<K>::is_zero(rem))
        throw std::domain_error("YPoly: not divisible by (1+y)");
      r.c = std::move(q);
      r.trim();
    }
    return r;
  }
};

using YPolynomial = YPoly<Rational>;

template <class K>
struct field_traits<YPoly<K>> {
  static YPoly<K> zero() { return YPoly<K>(); }
  static YPoly<K> one() { return YPoly<K>::one(); }
  static bool is_zero(const YPoly<K>& p) { return p.is_zero(); }
  static YPoly<K> from_rational(const Rational& q) {
    return YPoly<K>::constant(field_traits<K>::from_rational(q));
  }
};

template <class K>
inline YPoly<K> operator*(const K& k, const YPoly<K>& p) {
  return p.scaled(k);
}

}  // namespace latticetodd
