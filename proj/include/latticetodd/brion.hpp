#pragma once

#include "fan.hpp"
#include "laurent.hpp"
#include "oracle.hpp"

namespace latticetodd {

/// One factor 1/(1 - e^{2 pi i gamma} e^{<b, z>}).  gamma = 0 for the plain
/// Brion terms; Molien-type sums carry nontrivial rational rotation numbers.
struct DenomFactor {
  QVec exponent;   // b, nonzero
  Rational gamma;  // in [0, 1)
};

/// weight(y) * e^{2 pi i num_gamma} * e^{<num_exponent, z>} / prod factors.
struct ExpTerm {
  YPolynomial weight;
  QVec num_exponent;
  Rational num_gamma = 0;
  std::vector<DenomFactor> denominators;
};

/// Finite formal sum of exponential-rational terms; the image of the
/// summation map S.  Term order never affects an evaluation.
struct ExpRationalSum {
  std::size_t n = 0;
  std::vector<ExpTerm> terms;

  bool has_phases() const {
    for (const ExpTerm& t : terms) {
      if (t.num_gamma != 0) return true;
      for (const DenomFactor& d : t.denominators)
        if (d.gamma != 0) return true;
    }
    return false;
  }
  void append(const ExpRationalSum& o) {
    for (const ExpTerm& t : o.terms) terms.push_back(t);
  }
};

/// Direction for specializing z = t * xi, with the genericity certificate
/// checked against a term list before use.
struct EvaluationDirection {
  IVec xi;
};

inline void check_generic(const ExpRationalSum& s, const IVec& xi) {
  for (const ExpTerm& t : s.terms)
    for (const DenomFactor& d : t.denominators) {
      if (dot(d.exponent, to_qvec(xi)) == 0) {
        std::string v = "(";
        for (std::size_t i = 0; i < d.exponent.size(); ++i)
          v += (i ? "," : "") + to_string(d.exponent[i]);
        throw GeometryError("direction is not generic: orthogonal denominator vector " + v + ")");
      }
    }
}

/// Deterministic direction search: xi = (1, t, t^2, ...) over the prime
/// sequence; `seed` rotates the starting point of the scan.
inline EvaluationDirection find_generic_direction(const ExpRationalSum& s, unsigned seed = 0,
                                                  unsigned skip = 0) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                               41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
  const std::size_t nprimes = sizeof(primes) / sizeof(primes[0]);
  unsigned skipped = 0;
  for (std::size_t a = 0; a < nprimes; ++a) {
    Int t = primes[(a + seed) % nprimes];
    IVec xi(s.n);
    Int pw = 1;
    for (std::size_t i = 0; i < s.n; ++i) {
      xi[i] = pw;
      pw *= t;
    }
    try {
      check_generic(s, xi);
    } catch (const GeometryError&) {
      continue;
    }
    if (skipped++ >= skip) return {xi};
  }
  throw GeometryError("no generic direction found after bounded attempts");
}

/// Generating function of (v + C) ∩ M for a pointed cone C: one term per
/// half-open unimodular piece, e^{<v + sum_{removed} w, z>} / prod (1-e^{<w,z>}).
inline ExpRationalSum cone_exp_sum(const Cone& c, const QVec& apex) {
  if (!cone_pointed(c)) throw GeometryError("cone_exp_sum requires a pointed cone");
  ExpRationalSum s;
  s.n = c.n;
  if (c.generators.empty()) {
    ExpTerm t;
    t.weight = YPolynomial::one();
    t.num_exponent = apex;
    s.terms.push_back(std::move(t));
    return s;
  }
  auto pieces = unimodular_subdivide(c);
  for (const HalfOpenPiece& hp : half_open_cover(c, pieces)) {
    ExpTerm t;
    t.weight = YPolynomial::one();
    t.num_exponent = apex;
    for (std::size_t j = 0; j < hp.cone.generators.size(); ++j) {
      const IVec& w = hp.cone.generators[j];
      if (std::find(hp.removed.begin(), hp.removed.end(), j) != hp.removed.end())
        t.num_exponent = add(t.num_exponent, to_qvec(w));
      t.denominators.push_back({to_qvec(w), Rational(0)});
    }
    s.terms.push_back(std::move(t));
  }
  return s;
}

/// Relative-interior generating function of a face F of a simplicial cone,
/// by Moebius inversion over the generator subsets:
///   relint(F) = sum_{G <= F} (-1)^{dim F - dim G} cone(G).
/// The apex face (no generators) is the single term e^{<v, z>}.
inline ExpRationalSum relint_exp_sum(const Cone& f, const QVec& apex) {
  if (!f.simplicial())
    throw GeometryError("relint_exp_sum is implemented for simplicial faces");
  const std::size_t k = f.generators.size();
  ExpRationalSum s;
  s.n = f.n;
  for (std::size_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<IVec> sub;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) sub.push_back(f.generators[i]);
    unsigned codim = static_cast<unsigned>(k - sub.size());
    ExpRationalSum part =
        sub.empty() ? cone_exp_sum(Cone::make_trivial(f.n, f.m_side), apex)
                    : cone_exp_sum(Cone::make(sub, f.m_side), apex);
    Rational sign = codim % 2 == 0 ? Rational(1) : Rational(-1);
    for (ExpTerm& t : part.terms) {
      t.weight = t.weight.scaled(sign);
      s.terms.push_back(std::move(t));
    }
  }
  return s;
}

namespace detail {

/// Edge directions of face E at a vertex v of E: the generators of
/// E_v = Cone(E ∩ M - v).
inline std::vector<IVec> face_cone_generators(const LatticePolytope& p, const Face& e,
                                              std::size_t vertex_id) {
  std::vector<IVec> gens;
  for (const Face& g : p.faces) {
    if (g.dim != 1) continue;
    if (!std::includes(e.vertex_ids.begin(), e.vertex_ids.end(), g.vertex_ids.begin(),
                       g.vertex_ids.end()))
      continue;
    if (!std::binary_search(g.vertex_ids.begin(), g.vertex_ids.end(), vertex_id)) continue;
    std::size_t other = g.vertex_ids[0] == vertex_id ? g.vertex_ids[1] : g.vertex_ids[0];
    gens.push_back(to_primitive_int(sub(p.vertices[other], p.vertices[vertex_id])));
  }
  return gens;
}

}  // namespace detail

/// Weighted Brion summand at a vertex:
///   sum over faces E containing v of (1+y)^{dim E} relint(E_v) terms.
/// At y = 0 the face partition telescopes back to cone_exp_sum(C_v, v).
inline ExpRationalSum weighted_vertex_sum(const LatticePolytope& p, std::size_t vertex_id) {
  ExpRationalSum s;
  s.n = p.n;
  const QVec& v = p.vertices[vertex_id];
  for (const Face& e : p.faces) {
    if (!std::binary_search(e.vertex_ids.begin(), e.vertex_ids.end(), vertex_id)) continue;
    std::vector<IVec> gens = detail::face_cone_generators(p, e, vertex_id);
    ExpRationalSum part = gens.empty()
                              ? relint_exp_sum(Cone::make_trivial(p.n, true), v)
                              : relint_exp_sum(Cone::make(gens, true), v);
    YPolynomial w = YPolynomial::one_plus_y_pow(static_cast<unsigned>(e.dim));
    for (ExpTerm& t : part.terms) {
      t.weight = t.weight * w;
      s.terms.push_back(std::move(t));
    }
  }
  return s;
}

/// Exact evaluation along z = t*xi (phases must be absent): Laurent series in
/// t with Q[y] coefficients up to the requested order.
inline LaurentSeries<YPolynomial> evaluate_exact(const ExpRationalSum& s, const IVec& xi,
                                                 int order) {
  if (s.has_phases())
    throw GeometryError("exact evaluation requires a phase-free term list (Delzant data)");
  check_generic(s, xi);
  LaurentSeries<YPolynomial> total = LaurentSeries<YPolynomial>::zero(order);
  for (const ExpTerm& t : s.terms) {
    int k = static_cast<int>(t.denominators.size());
    int work = order + k + 1;
    LaurentSeries<YPolynomial> acc =
        exp_series<YPolynomial>(YPolynomial::constant(dot(t.num_exponent, to_qvec(xi))), work);
    for (const DenomFactor& d : t.denominators)
      acc = acc * inv_one_minus_exp_as<YPolynomial>(dot(d.exponent, to_qvec(xi)), work);
    acc = acc.scaled(t.weight);
    // clip to the common truncation before adding
    LaurentSeries<YPolynomial> clipped(acc.lo, order);
    for (int e = acc.lo; e <= order && e <= acc.order; ++e) clipped.at(e) = acc.coeff(e);
    if (acc.order < order) throw GeometryError("internal truncation shortfall");
    total = total + clipped;
  }
  return total;
}

/// Complex evaluation along z = t*xi with y sampled numerically.
inline LaurentSeries<Complex> evaluate_complex(const ExpRationalSum& s, const IVec& xi, int order,
                                               const Complex& y) {
  check_generic(s, xi);
  LaurentSeries<Complex> total = LaurentSeries<Complex>::zero(order);
  for (const ExpTerm& t : s.terms) {
    int k = static_cast<int>(t.denominators.size());
    int work = order + k + 1;
    Complex w(to_double(t.weight.coeff(0)), 0.0);
    {
      // weight(y) with the term phase
      Complex acc(0.0, 0.0), pw(1.0, 0.0);
      for (int i = 0; i <= t.weight.degree(); ++i) {
        acc += Complex(to_double(t.weight.coeff(static_cast<std::size_t>(i))), 0.0) * pw;
        pw *= y;
      }
      w = acc * root_of_unity(t.num_gamma);
    }
    LaurentSeries<Complex> acc =
        exp_series<Complex>(Complex(to_double(dot(t.num_exponent, to_qvec(xi))), 0.0), work);
    for (const DenomFactor& d : t.denominators) {
      Rational c = dot(d.exponent, to_qvec(xi));
      if (d.gamma == 0)
        acc = acc * inv_one_minus_exp_as<Complex>(c, work);
      else
        acc = acc * inv_one_minus_phase_exp(root_of_unity(d.gamma), to_double(c), work);
    }
    acc = acc.scaled(w);
    LaurentSeries<Complex> clipped(acc.lo, order);
    for (int e = acc.lo; e <= order && e <= acc.order; ++e) clipped.at(e) = acc.coeff(e);
    total = total + clipped;
  }
  return total;
}

/// Closed-form numeric value at a fixed z (no truncation): each factor
/// 1/(1 - w e^{<b,z>}) is evaluated directly.  Requires every <b, z> < 0.
inline Complex evaluate_at_point(const ExpRationalSum& s, const QVec& z, const Complex& y) {
  Complex total(0.0, 0.0);
  for (const ExpTerm& t : s.terms) {
    Complex w(0.0, 0.0), pw(1.0, 0.0);
    for (int i = 0; i <= t.weight.degree(); ++i) {
      w += Complex(to_double(t.weight.coeff(static_cast<std::size_t>(i))), 0.0) * pw;
      pw *= y;
    }
    w *= root_of_unity(t.num_gamma);
    Complex acc = w * std::exp(Complex(to_double(dot(t.num_exponent, z)), 0.0));
    for (const DenomFactor& d : t.denominators) {
      Rational c = dot(d.exponent, z);
      if (c >= 0) throw GeometryError("evaluate_at_point: exponent does not decay");
      acc /= Complex(1.0, 0.0) - root_of_unity(d.gamma) * std::exp(Complex(to_double(c), 0.0));
    }
    total += acc;
    check_finite(total);
  }
  return total;
}

/// |P ∩ M| via Brion's formula: vertex tangent-cone generating functions,
/// summed and evaluated at a generic direction; the principal part cancels
/// and the constant term is the count.
struct BrionEvaluation {
  LaurentSeries<YPolynomial> series;
  IVec xi;
};

inline BrionEvaluation brion_sum_evaluated(const LatticePolytope& p, int order, unsigned seed = 0,
                                           unsigned skip = 0) {
  if (!p.full_dimensional || !p.lattice)
    throw GeometryError("Brion counting requires a full-dimensional lattice polytope");
  ExpRationalSum s;
  s.n = p.n;
  for (std::size_t v = 0; v < p.vertices.size(); ++v)
    s.append(cone_exp_sum(tangent_cone(p, v), p.vertices[v]));
  EvaluationDirection dir = find_generic_direction(s, seed, skip);
  return {evaluate_exact(s, dir.xi, order), dir.xi};
}

inline Int brion_count(const LatticePolytope& p, unsigned seed = 0) {
  BrionEvaluation ev = brion_sum_evaluated(p, 0, seed);
  for (int k = -static_cast<int>(p.n); k < 0; ++k)
    if (!ev.series.coeff(k).is_zero())
      throw GeometryError("Brion principal part failed to cancel");
  YPolynomial c = ev.series.coeff(0);
  if (c.degree() > 0) throw GeometryError("count has spurious y-dependence");
  Rational v = c.coeff(0);
  if (!is_integer(v)) throw GeometryError("Brion count is not an integer");
  return num(v);
}

/// Weighted Brion: sum over faces E of (1+y)^{dim E} |Relint(E) ∩ M| as an
/// exact polynomial in y.
inline YPolynomial weighted_brion(const LatticePolytope& p, unsigned seed = 0) {
  if (!is_simple(p)) throw GeometryError("weighted Brion requires a simple polytope");
  ExpRationalSum s;
  s.n = p.n;
  for (std::size_t v = 0; v < p.vertices.size(); ++v) s.append(weighted_vertex_sum(p, v));
  EvaluationDirection dir = find_generic_direction(s, seed);
  LaurentSeries<YPolynomial> series = evaluate_exact(s, dir.xi, 0);
  for (int k = -static_cast<int>(p.n); k < 0; ++k)
    if (!series.coeff(k).is_zero())
      throw GeometryError("weighted Brion principal part failed to cancel");
  return series.coeff(0);
}

/// Molien-type generating function of a full-dimensional simplicial cone
/// sigma in N: the weighted sum over faces of sigma-dual,
///   (1/|G|) sum_g prod_i (1 + y a_i(g) X_i) / (1 - a_i(g) X_i),
/// with X_i = e^{<m'_i, z>} over the finer lattice M'.  Roots of unity stay
/// symbolic (gamma in Q/Z) until evaluation.
inline ExpRationalSum molien_sum(const Cone& sigma) {
  if (!sigma.simplicial() || sigma.dim() != sigma.n)
    throw GeometryError("molien_sum requires a full-dimensional simplicial cone");
  const std::size_t k = sigma.generators.size();
  std::vector<QVec> mh = dual_basis(sigma);
  std::vector<GroupElementData> group = group_data(sigma);
  Rational inv_order(1, Int(group.size()));
  ExpRationalSum s;
  s.n = sigma.n;
  for (const GroupElementData& g : group) {
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
      ExpTerm t;
      unsigned cnt = 0;
      t.num_exponent = QVec(sigma.n, Rational(0));
      Rational phase = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask & (1u << i)) {
          ++cnt;
          t.num_exponent = add(t.num_exponent, mh[i]);
          phase += g.gamma[i];
        }
      }
      phase -= Rational(floor_rat(phase));
      t.num_gamma = phase;
      YPolynomial w;
      w.c.assign(cnt + 1, Rational(0));
      w.c[cnt] = inv_order;
      w.trim();
      t.weight = w;
      for (std::size_t i = 0; i < k; ++i) t.denominators.push_back({mh[i], g.gamma[i]});
      s.terms.push_back(std::move(t));
    }
  }
  return s;
}

/// Variant with the facets indexed by K removed: factor
/// (1+y) a X/(1-aX) on K, (1+y aX)/(1-aX) elsewhere.
inline ExpRationalSum facets_removed_cone_sum(const Cone& sigma,
                                              const std::vector<std::size_t>& removed) {
  if (!sigma.simplicial() || sigma.dim() != sigma.n)
    throw GeometryError("facets_removed_cone_sum requires a full-dimensional simplicial cone");
  const std::size_t k = sigma.generators.size();
  std::vector<QVec> mh = dual_basis(sigma);
  std::vector<GroupElementData> group = group_data(sigma);
  Rational inv_order(1, Int(group.size()));
  auto is_removed = [&](std::size_t i) {
    return std::find(removed.begin(), removed.end(), i) != removed.end();
  };
  ExpRationalSum s;
  s.n = sigma.n;
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < k; ++i)
    if (!is_removed(i)) free_idx.push_back(i);
  for (const GroupElementData& g : group) {
    for (std::size_t mask = 0; mask < (1u << free_idx.size()); ++mask) {
      ExpTerm t;
      t.num_exponent = QVec(sigma.n, Rational(0));
      Rational phase = 0;
      unsigned ycount = 0;
      unsigned one_plus_y = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (is_removed(i)) {
          ++one_plus_y;  // mandatory (1+y) a_i X_i
          t.num_exponent = add(t.num_exponent, mh[i]);
          phase += g.gamma[i];
        }
      }
      for (std::size_t j = 0; j < free_idx.size(); ++j) {
        if (!(mask & (1u << j))) continue;
        std::size_t i = free_idx[j];
        ++ycount;
        t.num_exponent = add(t.num_exponent, mh[i]);
        phase += g.gamma[i];
      }
      phase -= Rational(floor_rat(phase));
      t.num_gamma = phase;
      YPolynomial w;
      w.c.assign(ycount + 1, Rational(0));
      w.c[ycount] = inv_order;
      w.trim();
      t.weight = w * YPolynomial::one_plus_y_pow(one_plus_y);
      for (std::size_t i = 0; i < k; ++i) t.denominators.push_back({mh[i], g.gamma[i]});
      s.terms.push_back(std::move(t));
    }
  }
  return s;
}

/// Dense graded expansion of an ExpRationalSum with rational grades: entry j
/// holds the coefficient of q^{j/denom_scale}.  Every denominator exponent
/// must pair strictly positively with xi.
struct GradedSeries {
  Int denom_scale = 1;
  std::vector<Complex> coeffs;  // index j <-> grade j / denom_scale

  Complex at_integer_grade(int g) const {
    std::size_t idx = static_cast<std::size_t>(Int(g) * denom_scale);
    return idx < coeffs.size() ? coeffs[idx] : Complex(0, 0);
  }
};

inline GradedSeries graded_series(const ExpRationalSum& s, const IVec& xi, int max_grade,
                                  const Complex& y) {
  Int q = 1;
  for (const ExpTerm& t : s.terms) {
    Rational g0 = dot(t.num_exponent, to_qvec(xi));
    if (g0 < 0) throw GeometryError("graded series: negative numerator grade");
    q = lcm(q, den(g0));
    for (const DenomFactor& d : t.denominators) {
      Rational c = dot(d.exponent, to_qvec(xi));
      if (c <= 0) throw GeometryError("graded series: non-positive denominator grade");
      q = lcm(q, den(c));
    }
  }
  std::size_t size = static_cast<std::size_t>(Int(max_grade) * q) + 1;
  GradedSeries out;
  out.denom_scale = q;
  out.coeffs.assign(size, Complex(0, 0));
  for (const ExpTerm& t : s.terms) {
    std::vector<Complex> acc(size, Complex(0, 0));
    Rational g0 = dot(t.num_exponent, to_qvec(xi));
    std::size_t start = static_cast<std::size_t>(num(g0 * Rational(q)));
    if (start >= size) continue;
    Complex w(0.0, 0.0), pw(1.0, 0.0);
    for (int i = 0; i <= t.weight.degree(); ++i) {
      w += Complex(to_double(t.weight.coeff(static_cast<std::size_t>(i))), 0.0) * pw;
      pw *= y;
    }
    w *= root_of_unity(t.num_gamma);
    acc[start] = w;
    for (const DenomFactor& d : t.denominators) {
      Rational c = dot(d.exponent, to_qvec(xi));
      std::size_t step = static_cast<std::size_t>(num(c * Rational(q)));
      Complex omega = root_of_unity(d.gamma);
      // multiply by sum_k omega^k q^{k step}: in-place prefix recurrence
      for (std::size_t j = step; j < size; ++j) acc[j] += omega * acc[j - step];
    }
    for (std::size_t j = 0; j < size; ++j) out.coeffs[j] += acc[j];
  }
  return out;
}

/// Continuous Brion data: integral generating function of P as a sum over
/// vertices of det * e^{<v,z>} * prod(-1/<w_i, z>).
struct ContinuousTerm {
  QVec vertex;
  Rational det;
  std::vector<IVec> denom_vectors;
};

inline std::vector<ContinuousTerm> continuous_brion(const LatticePolytope& p) {
  if (!is_simple(p)) throw GeometryError("continuous Brion requires a simple polytope");
  std::vector<ContinuousTerm> out;
  for (std::size_t v = 0; v < p.vertices.size(); ++v) {
    Cone c = tangent_cone(p, v);
    ContinuousTerm t;
    t.vertex = p.vertices[v];
    t.denom_vectors = c.generators;
    IntMatrix m(p.n, p.n);
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t j = 0; j < p.n; ++j) m(i, j) = c.generators[i][j];
    t.det = Rational(abs_int(det_int(m)));
    out.push_back(std::move(t));
  }
  return out;
}

/// Laurent evaluation of the continuous Brion sum along t*xi; the negative
/// part cancels and coefficient k equals (1/k!) * \int_P <m, xi>^k dm.
inline LaurentSeries<Rational> evaluate_continuous(const std::vector<ContinuousTerm>& terms,
                                                   const IVec& xi, int order,
                                                   std::size_t ambient_dim) {
  LaurentSeries<Rational> total = LaurentSeries<Rational>::zero(order);
  (void)ambient_dim;
  for (const ContinuousTerm& t : terms) {
    int k = static_cast<int>(t.denom_vectors.size());
    int work = order + k + 1;
    LaurentSeries<Rational> acc = exp_series<Rational>(dot(t.vertex, to_qvec(xi)), work);
    Rational scalar = t.det;
    for (const IVec& w : t.denom_vectors) {
      Rational c = dot(to_qvec(w), to_qvec(xi));
      if (c == 0) throw GeometryError("continuous evaluation: direction not generic");
      scalar *= -Rational(1) / c;
    }
    // multiply by t^{-k}
    LaurentSeries<Rational> shifted(acc.lo - k, std::min(acc.order - k, order));
    for (int e = shifted.lo; e <= shifted.order; ++e) shifted.at(e) = acc.coeff(e + k);
    total = total + shifted.scaled(scalar);
  }
  return total;
}

/// Ehrhart polynomial: interpolates |lP ∩ M| for l = 0..n.  Degree n, leading
/// coefficient vol(P), constant term 1.
inline QPoly ehrhart_polynomial(const LatticePolytope& p, unsigned seed = 0) {
  const unsigned n = static_cast<unsigned>(p.n);
  std::vector<std::pair<QVec, Rational>> samples;
  samples.push_back({QVec{Rational(0)}, Rational(1)});  // |0P ∩ M| = 1
  for (unsigned l = 1; l <= n; ++l)
    samples.push_back(
        {QVec{Rational(Int(l))}, Rational(brion_count(scale_polytope(p, Int(l)), seed))});
  return interpolate_multivariate(samples, n, 1);
}

/// chi_y-polynomial in the variable k = 1+y: the Ehrhart polynomial evaluated
/// at k; value 1 at k = 0 and |P ∩ M| at k = 1.
inline QPoly chi_y_polynomial(const LatticePolytope& p, unsigned seed = 0) {
  if (!is_simple(p)) throw GeometryError("chi_y polynomial requires a simple polytope");
  return ehrhart_polynomial(p, seed);
}

}  // namespace latticetodd
