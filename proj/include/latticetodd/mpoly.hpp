#pragma once

#include "linalg.hpp"
#include "ypoly.hpp"

#include <map>
#include <numeric>

namespace latticetodd {

using Exponents = std::vector<unsigned>;

inline unsigned total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

/// All exponent vectors in `nvars` variables with total degree <= bound,
/// graded-lexicographic order.
inline std::vector<Exponents> exponents_up_to(std::size_t nvars, unsigned bound) {
  std::vector<Exponents> out;
  Exponents cur(nvars, 0);
  // iterate by total degree
  for (unsigned d = 0; d <= bound; ++d) {
    // enumerate compositions of d into nvars parts
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned rem) {
      if (i + 1 == nvars) {
        cur[i] = rem;
        out.push_back(cur);
        return;
      }
      for (unsigned v = 0; v <= rem; ++v) {
        cur[i] = v;
        rec(i + 1, rem - v);
      }
    };
    if (nvars == 0) {
      if (d == 0) out.push_back(cur);
      continue;
    }
    rec(0, d);
  }
  return out;
}

/// Sparse multivariate polynomial over a coefficient ring K.
template <class K>
struct MPoly {
  std::size_t nvars = 0;
  std::map<Exponents, K> terms;

  MPoly() = default;
  explicit MPoly(std::size_t nv) : nvars(nv) {}

  static MPoly constant(std::size_t nv, const K& k) {
    MPoly p(nv);
    if (!field_traits<K>::is_zero(k)) p.terms[Exponents(nv, 0)] = k;
    return p;
  }
  static MPoly variable(std::size_t nv, std::size_t i) {
    MPoly p(nv);
    Exponents e(nv, 0);
    e[i] = 1;
    p.terms[e] = field_traits<K>::one();
    return p;
  }
  static MPoly monomial(std::size_t nv, const Exponents& e, const K& k) {
    MPoly p(nv);
    if (!field_traits<K>::is_zero(k)) p.terms[e] = k;
    return p;
  }

  bool is_zero() const { return terms.empty(); }
  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms) d = std::max(d, total_degree(e));
    return d;
  }
  K coeff(const Exponents& e) const {
    auto it = terms.find(e);
    return it == terms.end() ? field_traits<K>::zero() : it->second;
  }

  void add_term(const Exponents& e, const K& k) {
    auto it = terms.find(e);
    if (it == terms.end()) {
      if (!field_traits<K>::is_zero(k)) terms.emplace(e, k);
    } else {
      it->second += k;
      if (field_traits<K>::is_zero(it->second)) terms.erase(it);
    }
  }

  MPoly operator+(const MPoly& o) const {
    MPoly r(*this);
    for (const auto& [e, c] : o.terms) r.add_term(e, c);
    return r;
  }
  MPoly operator-(const MPoly& o) const {
    MPoly r(*this);
    for (const auto& [e, c] : o.terms) r.add_term(e, -c);
    return r;
  }
  MPoly operator*(const MPoly& o) const {
    MPoly r(nvars);
    for (const auto& [e1, c1] : terms)
      for (const auto& [e2, c2] : o.terms) {
        Exponents e(e1);
        for (std::size_t i = 0; i < nvars; ++i) e[i] += e2[i];
        r.add_term(e, c1 * c2);
      }
    return r;
  }
  MPoly& operator+=(const MPoly& o) { return *this = *this + o; }
  MPoly& operator-=(const MPoly& o) { return *this = *this - o; }

  MPoly scaled(const K& k) const {
    MPoly r(nvars);
    if (field_traits<K>::is_zero(k)) return r;
    for (const auto& [e, c] : terms) r.add_term(e, c * k);
    return r;
  }

  bool operator==(const MPoly& o) const { return nvars == o.nvars && terms == o.terms; }

  template <class V>
  V eval(const std::vector<V>& x) const {
    V acc = v_zero<V>();
    for (const auto& [e, c] : terms) {
      V t = lift<V>(c);
      for (std::size_t i = 0; i < nvars; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t = t * x[i];
      acc = acc + t;
    }
    return acc;
  }

  MPoly derivative(std::size_t i) const {
    MPoly r(nvars);
    for (const auto& [e, c] : terms) {
      if (e[i] == 0) continue;
      Exponents d(e);
      d[i] -= 1;
      r.add_term(d, c * field_traits<K>::from_rational(Rational(Int(e[i]))));
    }
    return r;
  }

  /// Directional derivative along v.
  MPoly directional_derivative(const QVec& v) const {
    MPoly r(nvars);
    for (std::size_t i = 0; i < nvars; ++i) {
      if (v[i] == 0) continue;
      r += derivative(i).scaled(field_traits<K>::from_rational(v[i]));
    }
    return r;
  }

  /// Substitute x_i = a_i0 + sum_j a_ij s_j (affine change into `ns` new vars).
  MPoly subst_affine(const std::vector<MPoly>& images) const {
    assert(images.size() == nvars);
    std::size_t ns = nvars ? images[0].nvars : 0;
    MPoly r(ns);
    for (const auto& [e, c] : terms) {
      MPoly t = MPoly::constant(ns, c);
      for (std::size_t i = 0; i < nvars; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t = t * images[i];
      r += t;
    }
    return r;
  }

 private:
  template <class V>
  static V v_zero() {
    return field_traits<V>::zero();
  }
  template <class V>
  static V lift(const K& c) {
    if constexpr (std::is_same_v<V, K>) return c;
    else return field_traits<V>::from_rational(c);  // only valid K=Rational -> V
  }
};

using QPoly = MPoly<Rational>;

/// Unique polynomial of total degree <= degree_bound through the samples,
/// by exact Gaussian elimination.  The sample set must be poised: the
/// evaluation matrix must have full column rank and a consistent solution.
inline QPoly interpolate_multivariate(const std::vector<std::pair<QVec, Rational>>& samples,
                                      unsigned degree_bound, std::size_t num_vars) {
  std::vector<Exponents> basis = exponents_up_to(num_vars, degree_bound);
  std::vector<QVec> a;
  QVec b;
  a.reserve(samples.size());
  for (const auto& [x, v] : samples) {
    QVec row(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Rational m = 1;
      for (std::size_t i = 0; i < num_vars; ++i)
        for (unsigned k = 0; k < basis[j][i]; ++k) m *= x[i];
      row[j] = m;
    }
    a.push_back(std::move(row));
    b.push_back(v);
  }
  if (rank_rational(a) != basis.size())
    throw std::invalid_argument(
        "interpolation grid is deficient: rank " + std::to_string(rank_rational(a)) + " < " +
        std::to_string(basis.size()) + " monomials for degree bound " + std::to_string(degree_bound));
  auto x = solve_rational(a, b);
  if (!x) throw std::invalid_argument("interpolation system inconsistent with the degree bound");
  QPoly p(num_vars);
  for (std::size_t j = 0; j < basis.size(); ++j) p.add_term(basis[j], (*x)[j]);
  return p;
}

/// Newton forward-difference interpolation on the principal lattice
/// { alpha * step : |alpha| <= degree_bound }.  `value(alpha)` supplies the
/// sample at grid point alpha.  Poised for total degree interpolation; exact.
template <class K, class ValueFn>
inline MPoly<K> newton_lattice_interpolate(std::size_t num_vars, unsigned degree_bound,
                                           const Rational& step, ValueFn&& value) {
  std::vector<Exponents> alphas = exponents_up_to(num_vars, degree_bound);
  std::map<Exponents, K> val;
  for (const Exponents& a : alphas) val[a] = value(a);

  // Per-variable Newton basis polynomial binom(x/step, k) expanded in x.
  // binom(u, k) = u(u-1)...(u-k+1)/k! with u = x/step.
  std::vector<MPoly<K>> var(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) var[i] = MPoly<K>::variable(num_vars, i);

  MPoly<K> result(num_vars);
  for (const Exponents& alpha : alphas) {
    // mixed forward difference at 0
    K delta = field_traits<K>::zero();
    std::vector<Exponents> betas;
    Exponents cur(num_vars, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == num_vars) {
        betas.push_back(cur);
        return;
      }
      for (unsigned v = 0; v <= alpha[i]; ++v) {
        cur[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
    for (const Exponents& beta : betas) {
      Int sign = 1, binom = 1;
      for (std::size_t i = 0; i < num_vars; ++i) {
        if ((alpha[i] - beta[i]) % 2 == 1) sign = -sign;
        // C(alpha_i, beta_i)
        Int c = 1;
        for (unsigned k = 0; k < beta[i]; ++k) c = c * Int(alpha[i] - k) / Int(k + 1);
        binom *= c;
      }
      delta += val[beta] * field_traits<K>::from_rational(Rational(sign * binom));
    }
    if (field_traits<K>::is_zero(delta)) continue;

    MPoly<K> basis = MPoly<K>::constant(num_vars, field_traits<K>::one());
    for (std::size_t i = 0; i < num_vars; ++i) {
      for (unsigned k = 0; k < alpha[i]; ++k) {
        // (x_i/step - k) / (k+1)
        MPoly<K> f = var[i].scaled(field_traits<K>::from_rational(Rational(1) / step)) -
                     MPoly<K>::constant(num_vars, field_traits<K>::from_rational(Rational(Int(k))));
        basis = basis * f.scaled(field_traits<K>::from_rational(Rational(1, Int(k + 1))));
      }
    }
    result += basis.scaled(delta);
  }
  return result;
}

}  // namespace latticetodd
