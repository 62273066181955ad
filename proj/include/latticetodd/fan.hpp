#pragma once

#include "polytope.hpp"

#include <map>

namespace latticetodd {

/// Rational polyhedral cone with apex 0, given by a minimal list of
/// primitive integer generators.  `m_side` tags the ambient lattice (M vs N);
/// the tag is bookkeeping only, all algorithms are lattice-agnostic.
struct Cone {
  std::size_t n = 0;
  std::vector<IVec> generators;
  bool m_side = false;

  static Cone make(std::vector<IVec> gens, bool m_side_tag) {
    Cone c;
    if (gens.empty()) throw GeometryError("cone needs ambient dimension; use make_trivial");
    c.n = gens[0].size();
    c.m_side = m_side_tag;
    for (IVec& g : gens) g = primitive(g);
    for (const IVec& g : gens) {
      bool dup = false;
      for (const IVec& h : c.generators) dup = dup || h == g;
      if (!dup) c.generators.push_back(g);
    }
    return c;
  }
  static Cone make_trivial(std::size_t n, bool m_side_tag) {
    Cone c;
    c.n = n;
    c.m_side = m_side_tag;
    return c;
  }

  std::size_t dim() const {
    if (generators.empty()) return 0;
    std::vector<QVec> rows;
    for (const IVec& g : generators) rows.push_back(to_qvec(g));
    return rank_rational(rows);
  }
  bool simplicial() const { return dim() == generators.size(); }
};

namespace detail {

/// The cone in coordinates of a saturated integer basis of its span: the same
/// generators become a full-dimensional configuration in Z^r.
struct SpanForm {
  std::size_t r = 0;               // span rank
  std::vector<IVec> basis;         // r ambient vectors, a lattice basis of span ∩ Z^n
  std::vector<IVec> gen_coords;    // generators in basis coordinates
};

inline SpanForm span_form(const Cone& c) {
  SpanForm sp;
  if (c.generators.empty()) return sp;
  const std::size_t n = c.n;
  SmithForm s = snf(IntMatrix::from_rows(c.generators));
  std::size_t r = 0;
  for (std::size_t i = 0; i < std::min(s.d.rows, s.d.cols); ++i)
    if (s.d(i, i) != 0) ++r;
  sp.r = r;
  // rows 0..r-1 of V^{-1} are a basis of the saturated span lattice
  std::vector<QVec> vt(n, QVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) vt[i][j] = Rational(s.v(j, i));
  for (std::size_t rr = 0; rr < r; ++rr) {
    QVec rhs(n, Rational(0));
    rhs[rr] = 1;
    auto x = solve_rational(vt, rhs);
    if (!x) throw GeometryError("span basis construction failed");
    IVec row(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_integer((*x)[i])) throw GeometryError("span basis not integral");
      row[i] = num((*x)[i]);
    }
    sp.basis.push_back(row);
  }
  // generator coordinates: solve basis^T x = g
  std::vector<QVec> bt(n, QVec(r));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) bt[i][j] = Rational(sp.basis[j][i]);
  for (const IVec& g : c.generators) {
    auto x = solve_rational(bt, to_qvec(g));
    if (!x) throw GeometryError("generator escaped its own span");
    IVec coord(r);
    for (std::size_t j = 0; j < r; ++j) {
      if (!is_integer((*x)[j])) throw GeometryError("generator has non-integral span coordinates");
      coord[j] = num((*x)[j]);
    }
    sp.gen_coords.push_back(coord);
  }
  return sp;
}

/// Facet normals of a full-dimensional cone configuration in Z^r, as primitive
/// functionals nonnegative on all generators.
inline std::vector<IVec> full_dim_facet_normals(const std::vector<IVec>& gens, std::size_t r) {
  std::vector<IVec> out;
  if (r == 0) return out;
  auto feasible = [&](const QVec& d) {
    for (const IVec& g : gens)
      if (dot(d, g) < 0) return false;
    return true;
  };
  if (r == 1) {
    for (int sgn : {1, -1}) {
      QVec d{Rational(sgn)};
      if (feasible(d)) out.push_back(to_primitive_int(d));
    }
    return out;
  }
  enumerate_subsets(gens.size(), r - 1, [&](const std::vector<std::size_t>& idx) {
    std::vector<QVec> rows;
    for (std::size_t i : idx) rows.push_back(to_qvec(gens[i]));
    if (rank_rational(rows) != r - 1) return;
    auto ker = nullspace_rational(rows);
    if (ker.size() != 1) return;
    for (int sgn : {1, -1}) {
      QVec d = scale(ker[0], Rational(sgn));
      if (!feasible(d)) continue;
      IVec p = to_primitive_int(d);
      bool dup = false;
      for (const IVec& h : out) dup = dup || h == p;
      if (!dup) out.push_back(p);
    }
  });
  return out;
}

}  // namespace detail

/// Generator-index subsets spanning the facets of a pointed cone.
inline std::vector<std::vector<std::size_t>> facet_subsets(const Cone& c) {
  detail::SpanForm sp = detail::span_form(c);
  std::vector<std::vector<std::size_t>> out;
  for (const IVec& nu : detail::full_dim_facet_normals(sp.gen_coords, sp.r)) {
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < sp.gen_coords.size(); ++i)
      if (dot(to_qvec(sp.gen_coords[i]), nu) == 0) on.push_back(i);
    if (!on.empty()) out.push_back(on);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Generators of the dual cone {xi : <g, xi> >= 0}.  For a full-dimensional
/// pointed cone these are the primitive facet normals; when dim C < n the
/// lineality of the dual appears as +/- basis pairs.
inline std::vector<IVec> dual_cone_generators(const Cone& c) {
  const std::size_t n = c.n;
  std::vector<IVec> out;
  for (const IVec& b : detail::integer_kernel(c.generators, n)) {
    out.push_back(b);
    IVec nb(b);
    for (Int& x : nb) x = -x;
    out.push_back(nb);
  }
  if (c.generators.empty()) return out;
  detail::SpanForm sp = detail::span_form(c);
  // lift each span-facet normal nu to an ambient functional mu with
  // <basis_j, mu> = nu_j
  for (const IVec& nu : detail::full_dim_facet_normals(sp.gen_coords, sp.r)) {
    std::vector<QVec> rows;
    QVec rhs;
    for (std::size_t j = 0; j < sp.r; ++j) {
      rows.push_back(to_qvec(sp.basis[j]));
      rhs.push_back(Rational(nu[j]));
    }
    auto mu = solve_rational(rows, rhs);
    if (!mu) throw GeometryError("dual lift failed");
    IVec p = to_primitive_int(*mu);
    bool dup = false;
    for (const IVec& h : out) dup = dup || h == p;
    if (!dup) out.push_back(p);
  }
  return out;
}

inline bool cone_contains(const Cone& c, const QVec& x) {
  for (const IVec& b : detail::integer_kernel(c.generators, c.n))
    if (dot(x, b) != 0) return false;
  if (c.generators.empty()) return true;  // x is in the span {0} iff x == 0, checked above
  detail::SpanForm sp = detail::span_form(c);
  std::vector<QVec> bt(c.n, QVec(sp.r));
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < sp.r; ++j) bt[i][j] = Rational(sp.basis[j][i]);
  auto coords = solve_rational(bt, x);
  if (!coords) return false;
  for (const IVec& nu : detail::full_dim_facet_normals(sp.gen_coords, sp.r))
    if (dot(*coords, nu) < 0) return false;
  return true;
}

/// Pointed iff the cone contains no line, i.e. its span form has a
/// full-dimensional dual.
inline bool cone_pointed(const Cone& c) {
  if (c.generators.empty()) return true;
  detail::SpanForm sp = detail::span_form(c);
  std::vector<QVec> rows;
  for (const IVec& d : detail::full_dim_facet_normals(sp.gen_coords, sp.r))
    rows.push_back(to_qvec(d));
  if (rows.empty()) return false;
  return rank_rational(rows) == sp.r;
}

/// Barycentric coordinates of x in a simplicial cone (exact); nullopt when x
/// is outside the span.
inline std::optional<QVec> simplicial_coordinates(const Cone& c, const QVec& x) {
  const std::size_t n = c.n, k = c.generators.size();
  std::vector<QVec> rows(n, QVec(k));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) rows[i][j] = Rational(c.generators[j][i]);
  return solve_rational(rows, x);
}

/// mult(sigma) = index of (u_1,...,u_k) in the saturated span lattice;
/// product of the nonzero Smith diagonal entries of the generator matrix.
inline Int multiplicity(const Cone& c) {
  if (!c.simplicial()) throw GeometryError("multiplicity requires a simplicial cone");
  if (c.generators.empty()) return 1;
  SmithForm s = snf(IntMatrix::from_rows(c.generators));
  Int m = 1;
  for (std::size_t i = 0; i < std::min(s.d.rows, s.d.cols); ++i)
    if (s.d(i, i) != 0) m *= s.d(i, i);
  return m;
}

/// Rational dual basis: mhat_j with <mhat_j, u_i> = delta_ij.  Pairings with
/// points of the span lattice do not depend on the lift choice.  These are
/// exactly the vectors m'_j = m_j / q_j of the Molien formulas.
inline std::vector<QVec> dual_basis(const Cone& c) {
  const std::size_t k = c.generators.size();
  std::vector<QVec> out;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<QVec> rows;
    QVec rhs;
    for (std::size_t i = 0; i < k; ++i) {
      rows.push_back(to_qvec(c.generators[i]));
      rhs.push_back(i == j ? Rational(1) : Rational(0));
    }
    auto m = solve_rational(rows, rhs);
    if (!m) throw GeometryError("dual basis requires independent generators");
    out.push_back(*m);
  }
  return out;
}

/// One element of G_sigma = N_sigma/(u_1,...,u_k): a lattice representative
/// and its character rotation numbers gamma_rho(g) in [0,1), one per
/// generator; a_rho(g) = exp(2 pi i gamma_rho(g)).
struct GroupElementData {
  IVec representative;
  QVec gamma;
  bool identity() const {
    for (const Rational& g : gamma)
      if (g != 0) return false;
    return true;
  }
  /// G_sigma^circ membership: every character nontrivial.
  bool in_g_circ() const {
    for (const Rational& g : gamma)
      if (g == 0) return false;
    return true;
  }
};

/// All mult(sigma) elements of N_sigma/(u_1,...,u_k); identity first,
/// deterministic order by character tuple.
inline std::vector<GroupElementData> group_data(const Cone& c) {
  if (!c.simplicial()) throw GeometryError("group_data requires a simplicial cone");
  const std::size_t n = c.n, k = c.generators.size();
  std::vector<GroupElementData> out;
  if (k == 0) {
    out.push_back({IVec(n, 0), QVec{}});
    return out;
  }
  detail::SpanForm sp = detail::span_form(c);
  // In span coordinates the generators form a k x k matrix G'; coset reps of
  // its row lattice in Z^k come from the Smith form: U G' V = D means the
  // rows of G' span the lattice generated by d_j * (row j of V^{-1}), so
  // { sum c_j w_j : 0 <= c_j < d_j } covers the quotient once.
  SmithForm s = snf(IntMatrix::from_rows(sp.gen_coords));
  std::vector<Int> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = s.d(i, i);
  // rows of V^{-1}
  std::vector<IVec> w(k, IVec(k));
  {
    std::vector<QVec> vt(k, QVec(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) vt[i][j] = Rational(s.v(j, i));
    for (std::size_t rr = 0; rr < k; ++rr) {
      QVec rhs(k, Rational(0));
      rhs[rr] = 1;
      auto x = solve_rational(vt, rhs);
      if (!x) throw GeometryError("group basis inversion failed");
      for (std::size_t i = 0; i < k; ++i) {
        if (!is_integer((*x)[i])) throw GeometryError("group basis not integral");
        w[rr][i] = num((*x)[i]);
      }
    }
  }
  std::vector<QVec> duals = dual_basis(c);
  IVec counter(k, 0);
  while (true) {
    // span-coordinate rep -> ambient rep through the span basis
    IVec coord(k, 0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < k; ++i) coord[i] += counter[j] * w[j][i];
    IVec rep(n, 0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) rep[i] += coord[j] * sp.basis[j][i];
    GroupElementData g;
    g.representative = rep;
    g.gamma.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      Rational t = dot(duals[j], rep);
      t -= Rational(floor_rat(t));
      g.gamma[j] = t;
    }
    out.push_back(std::move(g));
    std::size_t pos = 0;
    while (pos < k) {
      counter[pos] += 1;
      if (counter[pos] < d[pos]) break;
      counter[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  std::sort(out.begin(), out.end(), [](const GroupElementData& a, const GroupElementData& b) {
    return a.gamma < b.gamma;
  });
  if (out.empty() || !out[0].identity())
    throw GeometryError("group enumeration lost the identity element");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].gamma == out[i - 1].gamma)
      throw GeometryError("group enumeration produced duplicate characters");
  return out;
}

/// Elements of G_sigma^circ = { g : a_rho(g) != 1 for every ray }.
inline std::vector<GroupElementData> g_circ(const Cone& c) {
  std::vector<GroupElementData> out;
  for (const GroupElementData& g : group_data(c))
    if (!g.identity() && g.in_g_circ()) out.push_back(g);
  return out;
}

namespace detail {

/// Triangulates a pointed cone into simplicial subcones spanned by subsets of
/// its generators: cone from the first generator over the triangulated facets
/// that avoid it.
inline std::vector<Cone> triangulate_cone(const Cone& c) {
  if (c.simplicial()) return {c};
  std::vector<Cone> out;
  const IVec& apex = c.generators[0];
  for (const auto& sub : facet_subsets(c)) {
    bool has_apex = false;
    for (std::size_t i : sub) has_apex = has_apex || c.generators[i] == apex;
    if (has_apex) continue;
    std::vector<IVec> fgens;
    for (std::size_t i : sub) fgens.push_back(c.generators[i]);
    Cone facet = Cone::make(fgens, c.m_side);
    for (Cone piece : triangulate_cone(facet)) {
      std::vector<IVec> gens = piece.generators;
      gens.push_back(apex);
      out.push_back(Cone::make(gens, c.m_side));
    }
  }
  if (out.empty()) throw GeometryError("cone triangulation failed");
  return out;
}

}  // namespace detail

/// Refinement of a pointed cone into unimodular cones meeting in common
/// faces.  Stellar subdivision; the pivot is the fundamental-parallelepiped
/// lattice point of minimal generator-coordinate sum (lexicographic
/// tie-break), always taken from a cone of maximal multiplicity, and the
/// subdivision is applied to every cone of the current fan containing it.
inline std::vector<Cone> unimodular_subdivide(const Cone& c, std::size_t piece_cap = 4096) {
  if (!cone_pointed(c)) throw GeometryError("unimodular_subdivide requires a pointed cone");
  if (c.generators.empty()) return {c};
  std::vector<Cone> fan = detail::triangulate_cone(c);
  while (true) {
    std::size_t worst = fan.size();
    Int worst_mult = 1;
    for (std::size_t i = 0; i < fan.size(); ++i) {
      Int m = multiplicity(fan[i]);
      if (m > worst_mult) {
        worst_mult = m;
        worst = i;
      }
    }
    if (worst == fan.size()) return fan;
    if (fan.size() > piece_cap) throw ResourceError("unimodular subdivision exceeded piece cap");

    const Cone& bad = fan[worst];
    std::optional<QVec> best_frac;
    IVec pivot;
    for (const GroupElementData& g : group_data(bad)) {
      if (g.identity()) continue;
      auto lam = simplicial_coordinates(bad, to_qvec(g.representative));
      if (!lam) throw GeometryError("group representative escaped the cone span");
      // shift the representative into the half-open parallelepiped
      IVec point = g.representative;
      QVec frac(lam->size());
      for (std::size_t j = 0; j < lam->size(); ++j) {
        Int fl = floor_rat((*lam)[j]);
        frac[j] = (*lam)[j] - Rational(fl);
        for (std::size_t i = 0; i < bad.n; ++i) point[i] -= fl * bad.generators[j][i];
      }
      Rational fsum = 0;
      for (const Rational& f : frac) fsum += f;
      if (fsum == 0) continue;  // the identity coset
      bool better = !best_frac;
      if (!better) {
        Rational bsum = 0;
        for (const Rational& f : *best_frac) bsum += f;
        better = fsum < bsum || (fsum == bsum && frac < *best_frac);
      }
      if (better) {
        best_frac = frac;
        pivot = point;
      }
    }
    if (!best_frac) throw GeometryError("singular cone without parallelepiped points");

    std::vector<Cone> next;
    for (const Cone& k : fan) {
      auto lam = simplicial_coordinates(k, to_qvec(pivot));
      bool inside = lam.has_value();
      if (inside)
        for (const Rational& l : *lam) inside = inside && l >= 0;
      if (!inside) {
        next.push_back(k);
        continue;
      }
      bool split_any = false;
      for (std::size_t j = 0; j < k.generators.size(); ++j) {
        if ((*lam)[j] <= 0) continue;
        std::vector<IVec> gens = k.generators;
        gens[j] = pivot;
        next.push_back(Cone::make(gens, k.m_side));
        split_any = true;
      }
      if (!split_any) next.push_back(k);
    }
    fan = std::move(next);
  }
}

/// One unimodular piece with the facets in `removed` (indices into its
/// generator list) taken out; the pieces of one cover tile the parent cone
/// with every lattice point counted exactly once.
struct HalfOpenPiece {
  Cone cone;
  std::vector<std::size_t> removed;
};

/// Assigns every interior wall to exactly one side: a piece facet is removed
/// iff the fixed reference vector in relint(sigma) lies strictly on its
/// negative side.  Reference: sum of the parent generators, bumped by
/// (1/q) * first generator on wall ties.
inline std::vector<HalfOpenPiece> half_open_cover(const Cone& c, const std::vector<Cone>& pieces) {
  auto on_some_wall = [&](const QVec& r) {
    for (const Cone& p : pieces)
      for (const QVec& mj : dual_basis(p))
        if (dot(mj, r) == 0) return true;
    return false;
  };
  // reference = sum of parent generators; on ties bump by graded powers of
  // 1/q across all generators (a nonzero wall functional cannot vanish on
  // every parent generator, so some q works)
  QVec base(c.n, Rational(0));
  for (const IVec& g : c.generators) base = add(base, to_qvec(g));
  QVec ref = base;
  for (Int q = 2; on_some_wall(ref); ++q) {
    if (q > 1000) throw GeometryError("no generic reference vector found");
    ref = base;
    Rational w(1, q);
    for (const IVec& g : c.generators) {
      ref = add(ref, scale(to_qvec(g), w));
      w /= Rational(q);
    }
  }
  std::vector<HalfOpenPiece> out;
  for (const Cone& p : pieces) {
    HalfOpenPiece hp;
    hp.cone = p;
    std::vector<QVec> duals = dual_basis(p);
    for (std::size_t j = 0; j < duals.size(); ++j)
      if (dot(duals[j], ref) < 0) hp.removed.push_back(j);
    out.push_back(std::move(hp));
  }
  return out;
}

/// Inner normal fan of a full-dimensional polytope: one cone per face,
/// sigma_E = Cone(u_F : F contains E), rays aligned with the facet indexing.
struct NormalFan {
  const LatticePolytope* p = nullptr;
  std::vector<std::vector<std::size_t>> cone_rays;  // facet indices per face

  Cone cone_of_face(std::size_t face_index) const {
    const Face& f = p->faces[face_index];
    if (f.active.empty()) return Cone::make_trivial(p->n, false);
    std::vector<IVec> gens;
    for (std::size_t a : f.active) gens.push_back(p->normals[a]);
    return Cone::make(gens, false);
  }
};

inline NormalFan normal_fan(const LatticePolytope& p) {
  if (!p.full_dimensional) throw GeometryError("normal fan requires a full-dimensional polytope");
  NormalFan fan;
  fan.p = &p;
  for (const Face& f : p.faces) fan.cone_rays.push_back(f.active);
  return fan;
}

/// Tangent cone generators at a vertex: primitive edge directions.  The cone
/// lives in M with apex data v and equals the dual of the normal-fan vertex
/// cone.
inline Cone tangent_cone(const LatticePolytope& p, std::size_t vertex_id) {
  if (vertex_id >= p.vertices.size()) throw GeometryError("tangent_cone: no such vertex");
  std::vector<IVec> gens;
  for (const Face& f : p.faces) {
    if (f.dim != 1) continue;
    if (!std::binary_search(f.vertex_ids.begin(), f.vertex_ids.end(), vertex_id)) continue;
    std::size_t other = f.vertex_ids[0] == vertex_id ? f.vertex_ids[1] : f.vertex_ids[0];
    QVec dir = sub(p.vertices[other], p.vertices[vertex_id]);
    gens.push_back(to_primitive_int(dir));
  }
  if (gens.empty()) throw GeometryError("vertex has no incident edges");
  return Cone::make(gens, true);
}

/// Star fan of sigma_E in the quotient lattice N(sigma_E) = N / N_sigma.
/// Each star ray remembers the facet it came from and the divisibility
/// multiplier of its image: pi(u_rho) = multiplier * image.
struct StarFan {
  std::size_t q = 0;
  std::vector<IVec> proj_rows;  // q rows of length n
  struct Ray {
    std::size_t facet_index;
    IVec image;
    Int multiplier;
  };
  std::vector<Ray> rays;
  std::vector<std::vector<std::size_t>> cones;  // star-ray index sets, faces E' <= E

  IVec project(const IVec& v) const {
    IVec w(q);
    for (std::size_t i = 0; i < q; ++i) {
      Int s = 0;
      for (std::size_t j = 0; j < proj_rows[i].size(); ++j) s += proj_rows[i][j] * v[j];
      w[i] = s;
    }
    return w;
  }
  Cone cone_from(const std::vector<std::size_t>& ray_set) const {
    if (ray_set.empty()) return Cone::make_trivial(q, false);
    std::vector<IVec> gens;
    for (std::size_t i : ray_set) gens.push_back(rays[i].image);
    return Cone::make(gens, false);
  }
};

inline StarFan star_fan(const LatticePolytope& p, std::size_t face_index) {
  const Face& e = p.faces[face_index];
  const std::size_t n = p.n;
  StarFan sf;
  std::vector<IVec> gens;
  for (std::size_t a : e.active) gens.push_back(p.normals[a]);
  if (gens.empty()) {
    sf.q = n;
    for (std::size_t i = 0; i < n; ++i) {
      IVec r(n, 0);
      r[i] = 1;
      sf.proj_rows.push_back(r);
    }
  } else {
    SmithForm s = snf(IntMatrix::from_rows(gens));
    std::size_t k = 0;
    for (std::size_t i = 0; i < std::min(s.d.rows, s.d.cols); ++i)
      if (s.d(i, i) != 0) ++k;
    sf.q = n - k;
    // The saturated sublattice N_sigma is spanned by the first k rows of
    // V^{-1}; coordinates in the V^{-1}-row basis are x * V, so the quotient
    // projection is given by the last q columns of V.
    for (std::size_t col = k; col < n; ++col) {
      IVec row(n);
      for (std::size_t i = 0; i < n; ++i) row[i] = s.v(i, col);
      sf.proj_rows.push_back(row);
    }
  }

  std::map<std::size_t, std::size_t> ray_of_facet;
  for (const Face& f : p.faces) {
    if (f.dim != e.dim - 1) continue;
    if (!std::includes(e.vertex_ids.begin(), e.vertex_ids.end(), f.vertex_ids.begin(),
                       f.vertex_ids.end()))
      continue;
    for (std::size_t a : f.active) {
      if (std::binary_search(e.active.begin(), e.active.end(), a)) continue;
      if (ray_of_facet.count(a)) continue;
      IVec img = sf.project(p.normals[a]);
      bool zero = true;
      for (const Int& x : img) zero = zero && x == 0;
      if (zero) throw GeometryError("adjacent ray projected to zero");
      IVec prim = primitive(img);
      Int mult = 0;
      for (std::size_t i = 0; i < sf.q; ++i)
        if (prim[i] != 0) {
          mult = img[i] / prim[i];
          break;
        }
      sf.rays.push_back({a, prim, mult});
      ray_of_facet[a] = sf.rays.size() - 1;
    }
  }

  for (std::size_t fi = 0; fi < p.faces.size(); ++fi) {
    const Face& f = p.faces[fi];
    if (!std::includes(e.vertex_ids.begin(), e.vertex_ids.end(), f.vertex_ids.begin(),
                       f.vertex_ids.end()))
      continue;
    std::vector<std::size_t> ray_set;
    for (std::size_t a : f.active) {
      if (std::binary_search(e.active.begin(), e.active.end(), a)) continue;
      auto it = ray_of_facet.find(a);
      if (it == ray_of_facet.end())
        throw GeometryError("star fan: face uses a non-adjacent facet");
      ray_set.push_back(it->second);
    }
    std::sort(ray_set.begin(), ray_set.end());
    sf.cones.push_back(ray_set);
  }
  std::sort(sf.cones.begin(), sf.cones.end());
  sf.cones.erase(std::unique(sf.cones.begin(), sf.cones.end()), sf.cones.end());
  return sf;
}

/// Toric-fibration data of a globally generated divisor D' = sum d'_rho D_rho
/// on the normal fan of P: the polytope P_{D'}, the target face of every cone
/// and the orbit-count multiplicities d_ell per target face.
struct FibrationData {
  LatticePolytope p_dprime;
  std::vector<std::size_t> target_face;  // per face of P
  std::vector<int> ell;                  // per face of P
  std::map<std::pair<std::size_t, int>, Int> d;
};

inline FibrationData fibration_multiplicities(const LatticePolytope& p, const IVec& dprime) {
  if (dprime.size() != p.facet_count())
    throw GeometryError("divisor coefficient list length != facet count");
  const std::size_t n = p.n;

  for (std::size_t v = 0; v < p.vertices.size(); ++v) {
    std::vector<QVec> rows;
    QVec rhs;
    for (std::size_t a : p.vertex_active[v]) {
      rows.push_back(to_qvec(p.normals[a]));
      rhs.push_back(Rational(-dprime[a]));
    }
    auto m = solve_rational(rows, rhs);
    bool ok = m.has_value();
    if (ok)
      for (std::size_t i = 0; i < p.facet_count(); ++i)
        ok = ok && dot(*m, p.normals[i]) + Rational(dprime[i]) >= 0;
    if (!ok)
      throw GeometryError("divisor is not globally generated: failing cone at vertex " +
                          std::to_string(v));
  }

  FibrationData fd;
  QVec off(dprime.size());
  for (std::size_t i = 0; i < dprime.size(); ++i) off[i] = Rational(dprime[i]);
  fd.p_dprime = detail::build_from_halfspaces(p.normals, off, true);

  for (std::size_t fi = 0; fi < p.faces.size(); ++fi) {
    const Face& src = p.faces[fi];
    QVec u(n, Rational(0));
    for (std::size_t a : src.active) u = add(u, to_qvec(p.normals[a]));
    Rational best;
    bool first = true;
    for (const QVec& vert : fd.p_dprime.vertices) {
      Rational val = dot(vert, u);
      if (first || val < best) {
        best = val;
        first = false;
      }
    }
    std::vector<std::size_t> min_vertex_ids;
    for (std::size_t vi = 0; vi < fd.p_dprime.vertices.size(); ++vi)
      if (dot(fd.p_dprime.vertices[vi], u) == best) min_vertex_ids.push_back(vi);
    std::size_t target = fd.p_dprime.faces.size();
    for (std::size_t gi = 0; gi < fd.p_dprime.faces.size(); ++gi)
      if (fd.p_dprime.faces[gi].vertex_ids == min_vertex_ids) target = gi;
    if (target == fd.p_dprime.faces.size())
      throw GeometryError("minimizing face not in the face lattice of P_{D'}");
    int srcdim = static_cast<int>(n) - static_cast<int>(src.active.size());
    int l = srcdim - fd.p_dprime.faces[target].dim;
    if (l < 0) throw GeometryError("negative relative orbit dimension");
    fd.target_face.push_back(target);
    fd.ell.push_back(l);
    fd.d[{target, l}] += 1;
  }
  return fd;
}

}  // namespace latticetodd
