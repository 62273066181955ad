#pragma once

#include "rational.hpp"
#include "ypoly.hpp"

#include <mutex>

namespace latticetodd {

/// Bernoulli numbers in the B_1 = -1/2 convention, so that
/// s/(e^s - 1) = sum_k B_k s^k / k!.  Akiyama-Tanigawa over exact rationals,
/// memoized.
inline Rational bernoulli(std::size_t k) {
  static std::vector<Rational> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (cache.size() <= k) {
    std::size_t n = cache.size();
    QVec a(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
      a[m] = Rational(1, Int(m + 1));
      for (std::size_t j = m; j >= 1; --j) a[j - 1] = Rational(Int(j)) * (a[j - 1] - a[j]);
    }
    // Akiyama-Tanigawa yields B_1 = +1/2; flip to the minus convention.
    cache.push_back(n == 1 ? -a[0] : a[0]);
  }
  return cache[k];
}

/// Truncated Laurent series: coefficients for exponents lo..order inclusive.
/// Arithmetic never reads beyond the carried truncation order.
template <class C>
struct LaurentSeries {
  int lo = 0;
  int order = -1;  // highest exponent carried; order < lo means the zero series
  std::vector<C> coeffs;

  LaurentSeries() = default;
  LaurentSeries(int lo_, int order_) : lo(lo_), order(order_) {
    if (order >= lo) coeffs.assign(static_cast<std::size_t>(order - lo + 1), field_traits<C>::zero());
  }

  static LaurentSeries zero(int order_) { return LaurentSeries(order_ + 1, order_); }
  static LaurentSeries constant(const C& c, int order_) {
    LaurentSeries s(0, order_);
    if (order_ >= 0) s.coeffs[0] = c;
    return s;
  }

  C coeff(int k) const {
    if (k < lo || k > order) return field_traits<C>::zero();
    return coeffs[static_cast<std::size_t>(k - lo)];
  }
  C& at(int k) { return coeffs[static_cast<std::size_t>(k - lo)]; }

  /// Drops leading stored zeros (raises lo); truncation order unchanged.
  void normalize() {
    std::size_t drop = 0;
    while (drop < coeffs.size() && field_traits<C>::is_zero(coeffs[drop])) ++drop;
    if (drop) {
      coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(drop));
      lo += static_cast<int>(drop);
    }
  }

  bool is_zero() const {
    for (const C& c : coeffs)
      if (!field_traits<C>::is_zero(c)) return false;
    return true;
  }

  LaurentSeries operator+(const LaurentSeries& o) const {
    LaurentSeries r(std::min(lo, o.lo), std::min(order, o.order));
    for (int k = r.lo; k <= r.order; ++k) r.at(k) = coeff(k) + o.coeff(k);
    return r;
  }
  LaurentSeries operator-() const {
    LaurentSeries r(*this);
    for (C& c : r.coeffs) c = -c;
    return r;
  }
  LaurentSeries operator-(const LaurentSeries& o) const { return *this + (-o); }

  /// Product truncation: coefficients of f*g are reliable up to
  /// min(order_f + lo_g, order_g + lo_f).
  LaurentSeries operator*(const LaurentSeries& o) const {
    if (is_zero() || o.is_zero()) {
      int tr = std::min(order + o.lo, o.order + lo);
      return zero(tr);
    }
    LaurentSeries r(lo + o.lo, std::min(order + o.lo, o.order + lo));
    for (int i = lo; i <= order; ++i) {
      if (field_traits<C>::is_zero(coeff(i))) continue;
      for (int j = o.lo; j <= o.order && i + j <= r.order; ++j) {
        r.at(i + j) += coeff(i) * o.coeff(j);
      }
    }
    return r;
  }

  LaurentSeries scaled(const C& c) const {
    LaurentSeries r(*this);
    for (C& x : r.coeffs) x = x * c;
    return r;
  }

  /// Inverse of a series whose lowest nonzero coefficient is invertible.
  /// Result carries exponents -L .. order - 2L for L the true valuation.
  LaurentSeries inverse() const {
    LaurentSeries f(*this);
    f.normalize();
    if (f.coeffs.empty() || field_traits<C>::is_zero(f.coeffs[0]))
      throw std::domain_error("LaurentSeries::inverse of zero series");
    int L = f.lo;
    int m = f.order - L;  // number of known power-series terms minus 1
    // write f = c t^L (1 + u); invert 1+u by recursion
    C c0 = f.coeffs[0];
    std::vector<C> u(f.coeffs.begin(), f.coeffs.end());
    std::vector<C> inv(static_cast<std::size_t>(m + 1), field_traits<C>::zero());
    C c0inv = invert_scalar(c0);
    inv[0] = field_traits<C>::one();
    for (int k = 1; k <= m; ++k) {
      C s = field_traits<C>::zero();
      for (int j = 1; j <= k; ++j) s += (u[static_cast<std::size_t>(j)] * c0inv) * inv[static_cast<std::size_t>(k - j)];
      inv[static_cast<std::size_t>(k)] = -s;
    }
    LaurentSeries r(-L, -L + m);
    for (int k = 0; k <= m; ++k) r.at(-L + k) = inv[static_cast<std::size_t>(k)] * c0inv;
    return r;
  }

 private:
  static C invert_scalar(const C& c);
};

template <>
inline Rational LaurentSeries<Rational>::invert_scalar(const Rational& c) {
  return Rational(1) / c;
}
template <>
inline Complex LaurentSeries<Complex>::invert_scalar(const Complex& c) {
  return Complex(1.0, 0.0) / c;
}
template <>
inline YPoly<Rational> LaurentSeries<YPoly<Rational>>::invert_scalar(const YPoly<Rational>& c) {
  if (c.degree() != 0) throw std::domain_error("cannot invert a nonconstant y-polynomial");
  return YPoly<Rational>::constant(Rational(1) / c.coeff(0));
}
template <>
inline YPoly<Complex> LaurentSeries<YPoly<Complex>>::invert_scalar(const YPoly<Complex>& c) {
  if (c.degree() != 0) throw std::domain_error("cannot invert a nonconstant y-polynomial");
  return YPoly<Complex>::constant(Complex(1.0, 0.0) / c.coeff(0));
}

/// e^{a t} truncated at the given order.
template <class C>
inline LaurentSeries<C> exp_series(const C& a, int order) {
  LaurentSeries<C> s(0, order);
  C pw = field_traits<C>::one();
  Rational fact = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) {
      pw = pw * a;
      fact *= k;
    }
    s.at(k) = pw * field_traits<C>::from_rational(Rational(1) / fact);
  }
  return s;
}

/// 1/(1 - e^{a t}) as an exact Laurent series: lowest exponent -1 with
/// coefficient -1/a, then Bernoulli terms: -(1/(a t)) sum_k B_k (a t)^k / k!.
inline LaurentSeries<Rational> laurent_inverse_one_minus_exp(const Rational& a, int order) {
  if (a == 0) throw std::domain_error("1/(1-e^{a t}) has a pole at the identity: a = 0");
  LaurentSeries<Rational> s(-1, order);
  Rational apow = 1;  // a^{k-1} with k starting at 0 => a^{-1}
  apow = Rational(1) / a;
  Rational fact = 1;
  for (int k = 0; k - 1 <= order; ++k) {
    if (k > 0) {
      apow *= a;
      fact *= k;
    }
    s.at(k - 1) = -bernoulli(static_cast<std::size_t>(k)) * apow / fact;
  }
  return s;
}

/// The same expansion with coefficients lifted into an arbitrary field.
template <class C>
inline LaurentSeries<C> inv_one_minus_exp_as(const Rational& a, int order) {
  LaurentSeries<Rational> q = laurent_inverse_one_minus_exp(a, order);
  LaurentSeries<C> s(q.lo, q.order);
  for (int k = q.lo; k <= q.order; ++k) s.at(k) = field_traits<C>::from_rational(q.coeff(k));
  return s;
}

/// 1/(1 - w e^{a t}) for w != 1: a regular power series, computed by division.
inline LaurentSeries<Complex> inv_one_minus_phase_exp(const Complex& w, double a, int order) {
  LaurentSeries<Complex> den(0, order);
  double pw = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) {
      pw *= a;
      fact *= k;
    }
    den.at(k) = (k == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0)) - w * Complex(pw / fact, 0.0);
  }
  return den.inverse();
}

}  // namespace latticetodd
