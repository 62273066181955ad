#pragma once

#include "fan.hpp"

#include <cstdlib>

namespace latticetodd {
namespace oracle {

/// Candidate cap for exhaustive scans; LATTICETODD_CAP overrides the default.
inline Int scan_cap() {
  if (const char* env = std::getenv("LATTICETODD_CAP")) return Int(std::string(env));
  return Int(10000000);
}

/// Per-coordinate integer bounds containing the target region.
struct BoundingBox {
  IVec lower, upper;

  static BoundingBox of_vertices(const std::vector<QVec>& vertices) {
    if (vertices.empty()) throw GeometryError("bounding box of nothing");
    std::size_t n = vertices[0].size();
    BoundingBox b{IVec(n), IVec(n)};
    for (std::size_t j = 0; j < n; ++j) {
      Rational lo = vertices[0][j], hi = vertices[0][j];
      for (const QVec& v : vertices) {
        lo = std::min(lo, v[j]);
        hi = std::max(hi, v[j]);
      }
      b.lower[j] = floor_rat(lo);
      b.upper[j] = ceil_rat(hi);
    }
    return b;
  }

  Int candidate_count() const {
    Int c = 1;
    for (std::size_t j = 0; j < lower.size(); ++j) c *= (upper[j] - lower[j] + 1);
    return c;
  }

  template <class Fn>
  void scan(Fn&& fn) const {
    if (candidate_count() > scan_cap())
      throw ResourceError("bounding-box scan exceeds the candidate cap");
    std::size_t n = lower.size();
    IVec cur(lower);
    while (true) {
      fn(cur);
      std::size_t pos = n;
      while (pos-- > 0) {
        cur[pos] += 1;
        if (cur[pos] <= upper[pos]) break;
        cur[pos] = lower[pos];
        if (pos == 0) return;
      }
      if (pos == SIZE_MAX) return;
    }
  }
};

/// Exhaustive lattice-point list of an H-described region (rational offsets
/// allowed), sorted lexicographically.
inline std::vector<IVec> lattice_points(const LatticePolytope& p) {
  BoundingBox box = BoundingBox::of_vertices(p.vertices);
  std::vector<IVec> out;
  box.scan([&](const IVec& m) {
    if (p.contains(to_qvec(m))) out.push_back(m);
  });
  std::sort(out.begin(), out.end());
  return out;
}

/// Lattice points of P with the facets indexed by K removed (strict there).
inline std::vector<IVec> lattice_points_facets_removed(const LatticePolytope& p,
                                                       const std::vector<std::size_t>& removed) {
  BoundingBox box = BoundingBox::of_vertices(p.vertices);
  std::vector<IVec> out;
  box.scan([&](const IVec& m) {
    QVec q = to_qvec(m);
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
      Rational v = dot(q, p.normals[i]) + p.offsets[i];
      bool strict = std::find(removed.begin(), removed.end(), i) != removed.end();
      if (strict ? (v <= 0) : (v < 0)) return;
    }
    out.push_back(m);
  });
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<IVec> interior_lattice_points(const LatticePolytope& p) {
  std::vector<std::size_t> all(p.facet_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return lattice_points_facets_removed(p, all);
}

inline Rational sum_polynomial(const std::vector<IVec>& points, const QPoly& f) {
  Rational s = 0;
  for (const IVec& m : points) s += f.eval(to_qvec(m));
  return s;
}

/// Sum over faces E of (1+y)^{dim E} * sum of f over Relint(E) ∩ M, by direct
/// face iteration and active-set membership tests (no generating functions).
inline YPolynomial weighted_face_sum(const LatticePolytope& p, const QPoly& f) {
  BoundingBox box = BoundingBox::of_vertices(p.vertices);
  YPolynomial total;
  for (const Face& face : p.faces) {
    Rational s = 0;
    box.scan([&](const IVec& m) {
      QVec q = to_qvec(m);
      if (p.relint_contains(face, q)) s += f.eval(q);
    });
    if (s != 0)
      total += YPolynomial::one_plus_y_pow(static_cast<unsigned>(face.dim)).scaled(s);
  }
  return total;
}

/// Weighted face sum restricted to P^K (faces not inside a removed facet).
inline YPolynomial weighted_face_sum_facets_removed(const LatticePolytope& p, const QPoly& f,
                                                    const std::vector<std::size_t>& removed) {
  BoundingBox box = BoundingBox::of_vertices(p.vertices);
  YPolynomial total;
  for (const Face& face : p.faces) {
    bool keeps = true;
    for (std::size_t k : removed)
      keeps = keeps && !std::binary_search(face.active.begin(), face.active.end(), k);
    if (!keeps) continue;
    Rational s = 0;
    box.scan([&](const IVec& m) {
      QVec q = to_qvec(m);
      if (p.relint_contains(face, q)) s += f.eval(q);
    });
    if (s != 0)
      total += YPolynomial::one_plus_y_pow(static_cast<unsigned>(face.dim)).scaled(s);
  }
  return total;
}

/// Lattice points of the cone (apex shifted by v) up to the given grade
/// against the positive functional xi: { x in C ∩ M : <x, xi> <= radius }.
inline std::vector<IVec> cone_points_graded(const Cone& c, const IVec& xi, const Int& radius) {
  for (const IVec& g : c.generators)
    if (dot(to_qvec(g), xi) <= 0)
      throw GeometryError("grading functional must be positive on the cone generators");
  std::size_t n = c.n;
  // box bound: x = sum lambda_i g_i with lambda_i <= radius / <g_i, xi>
  QVec lam_max;
  for (const IVec& g : c.generators) lam_max.push_back(Rational(radius) / Rational(dot(g, xi)));
  IVec lo(n, 0), hi(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    Rational losum = 0, hisum = 0;
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
      Rational contrib = lam_max[i] * Rational(c.generators[i][j]);
      if (contrib < 0) losum += contrib;
      if (contrib > 0) hisum += contrib;
    }
    lo[j] = floor_rat(losum);
    hi[j] = ceil_rat(hisum);
  }
  BoundingBox box{lo, hi};
  std::vector<IVec> out;
  box.scan([&](const IVec& m) {
    if (dot(m, xi) > radius) return;
    if (cone_contains(c, to_qvec(m))) out.push_back(m);
  });
  std::sort(out.begin(), out.end());
  return out;
}

/// Partial sum of e^{<m, z>} over (v+C) ∩ M with grade <m - v, -z> bounded,
/// plus a geometric tail estimate.  Requires -z in the interior of the dual.
struct ConeSeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

inline ConeSeriesValue cone_series_numeric(const Cone& c, const QVec& apex, const QVec& z,
                                           int radius) {
  for (const IVec& g : c.generators)
    if (dot(z, g) >= 0)
      throw GeometryError("cone_series_numeric: z must pair negatively with every generator");
  // integer grading functional proportional to -z
  Int l = 1;
  for (const Rational& q : z) l = lcm(l, den(q));
  IVec xi(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) xi[i] = -num(z[i]) * (l / den(z[i]));
  Int scaled_radius = Int(radius) * l;
  double base = std::exp(to_double(dot(z, apex)));
  double value = 0.0, shell = 0.0;
  for (const IVec& m : cone_points_graded(c, xi, scaled_radius)) {
    double t = std::exp(to_double(dot(z, to_qvec(m))));
    value += t;
    if (Rational(dot(m, xi)) > Rational(scaled_radius) - Rational(l)) shell += t;
  }
  double rho = 0.0;
  for (const IVec& g : c.generators) rho = std::max(rho, std::exp(to_double(dot(z, g))));
  ConeSeriesValue out;
  out.value = base * value;
  out.tail_bound = rho < 1.0 ? base * shell * rho / (1.0 - rho) * c.generators.size() : 1e300;
  return out;
}

/// (1/k^n) sum over P ∩ (1/k)M of f, exactly.
inline Rational riemann_integral_check(const LatticePolytope& p, const QPoly& f, unsigned k) {
  if (k == 0 || k > 64) throw ResourceError("riemann check: k out of range");
  LatticePolytope kp = scale_polytope(p, Int(k));
  Rational s = 0;
  for (const IVec& m : lattice_points(kp)) {
    QVec x = scale(to_qvec(m), Rational(1, Int(k)));
    s += f.eval(x);
  }
  return s / qpow(Rational(Int(k)), static_cast<int>(p.n));
}

/// Graded weighted counts of a simplicial cone: entry j is
/// sum over { m in C ∩ M : <m, xi> = j } of (1+y)^{dim of the face whose
/// relative interior holds m }.  y = 0 gives plain graded counts.
inline std::vector<YPolynomial> cone_graded_weighted_counts(const Cone& c, const IVec& xi,
                                                            int max_grade) {
  if (!c.simplicial()) throw GeometryError("graded weighted counts need a simplicial cone");
  std::vector<YPolynomial> out(static_cast<std::size_t>(max_grade) + 1);
  for (const IVec& m : cone_points_graded(c, xi, Int(max_grade))) {
    Int grade = dot(m, xi);
    auto lam = simplicial_coordinates(c, to_qvec(m));
    if (!lam) throw GeometryError("cone point escaped the span");
    unsigned support = 0;
    for (const Rational& l : *lam) support += l > 0 ? 1 : 0;
    out[static_cast<std::size_t>(grade)] += YPolynomial::one_plus_y_pow(support);
  }
  return out;
}

}  // namespace oracle
}  // namespace latticetodd
