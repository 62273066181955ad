#pragma once

#include "linalg.hpp"
#include "mpoly.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace latticetodd {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A face of a polytope: the facets active on it, its dimension, its
/// vertices, and an integer basis of Span(E - m0) ∩ M obtained via SNF.
struct Face {
  std::vector<std::size_t> active;      // sorted facet indices
  int dim = -1;
  std::vector<std::size_t> vertex_ids;  // sorted
  std::size_t base_vertex_id = 0;       // chosen m0 on the face
  std::vector<IVec> span_basis;         // rank == dim
};

/// Bounded intersection of halfspaces <m, u_i> + c_i >= 0 with primitive
/// integer inward normals.  Offsets are rational so the same struct carries
/// dilated regions P(h); a lattice polytope has integer offsets and integer
/// vertices.  Faces are keyed by active facet sets; the face list always
/// contains P itself and every vertex.
struct LatticePolytope {
  std::size_t n = 0;
  std::vector<IVec> normals;
  QVec offsets;
  std::vector<QVec> vertices;
  std::vector<std::vector<std::size_t>> vertex_active;  // sorted facet indices per vertex
  std::vector<Face> faces;                              // sorted by (dim, active)
  bool full_dimensional = false;
  bool lattice = false;     // integer vertices and offsets
  bool degenerate = false;  // collapsed region (allowed only via dilate_y)

  std::size_t facet_count() const { return normals.size(); }

  const Face& face_of_active(const std::vector<std::size_t>& active) const {
    for (const Face& f : faces)
      if (f.active == active) return f;
    throw GeometryError("no face with the given active facet set");
  }

  std::size_t whole_face_index() const {
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (faces[i].dim == static_cast<int>(n)) return i;
    throw GeometryError("face lattice missing the polytope itself");
  }

  bool contains(const QVec& m) const {
    for (std::size_t i = 0; i < normals.size(); ++i)
      if (dot(m, normals[i]) + offsets[i] < 0) return false;
    return true;
  }

  /// Membership in the relative interior of a face: equality exactly on the
  /// face's active set, strict elsewhere.
  bool relint_contains(const Face& f, const QVec& m) const {
    for (std::size_t i = 0; i < normals.size(); ++i) {
      Rational v = dot(m, normals[i]) + offsets[i];
      bool is_active = std::binary_search(f.active.begin(), f.active.end(), i);
      if (is_active ? (v != 0) : (v <= 0)) return false;
    }
    return true;
  }
};

using DilationVector = QVec;  // one rational h_rho per facet index

namespace detail {

inline std::vector<std::size_t> active_set(const std::vector<IVec>& normals, const QVec& offsets,
                                           const QVec& m) {
  std::vector<std::size_t> a;
  for (std::size_t i = 0; i < normals.size(); ++i)
    if (dot(m, normals[i]) + offsets[i] == 0) a.push_back(i);
  return a;
}

inline int affine_rank(const std::vector<QVec>& pts) {
  if (pts.empty()) return -1;
  std::vector<QVec> rows;
  for (std::size_t i = 1; i < pts.size(); ++i) rows.push_back(sub(pts[i], pts[0]));
  if (rows.empty()) return 0;
  return static_cast<int>(rank_rational(rows));
}

/// Integer kernel basis of the matrix with the given rows: the saturated
/// sublattice {x : <x, row_i> = 0}.  Columns of V for the zero diagonal of
/// the Smith form.
inline std::vector<IVec> integer_kernel(const std::vector<IVec>& rows, std::size_t n) {
  if (rows.empty()) {
    std::vector<IVec> basis;
    for (std::size_t i = 0; i < n; ++i) {
      IVec e(n, 0);
      e[i] = 1;
      basis.push_back(e);
    }
    return basis;
  }
  SmithForm s = snf(IntMatrix::from_rows(rows));
  std::size_t r = 0;
  for (std::size_t i = 0; i < std::min(s.d.rows, s.d.cols); ++i)
    if (s.d(i, i) != 0) ++r;
  std::vector<IVec> basis;
  for (std::size_t j = r; j < n; ++j) {
    IVec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = s.v(i, j);
    basis.push_back(col);
  }
  return basis;
}

inline void enumerate_subsets(std::size_t n, std::size_t k,
                              const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      fn(idx);
      return;
    }
    for (std::size_t i = start; i + (k - depth) <= n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

/// Builds vertex set, face lattice and flags from validated H-data.
/// Throws GeometryError for unbounded/empty/lower-dimensional input unless
/// `allow_degenerate` (then a collapsed region gets the degenerate flag).
inline LatticePolytope build_from_halfspaces(std::vector<IVec> normals, QVec offsets,
                                             bool allow_degenerate) {
  LatticePolytope p;
  if (normals.empty()) throw GeometryError("empty halfspace list");
  p.n = normals[0].size();
  const std::size_t n = p.n, r = normals.size();
  if (r > 32) throw ResourceError("more than 32 facets exceeds the desk-scale cap");
  if (n > 4) throw ResourceError("ambient dimension > 4 exceeds the desk-scale cap");
  for (const IVec& u : normals) {
    if (u.size() != n) throw GeometryError("normal with inconsistent dimension");
    if (u != primitive(u)) throw GeometryError("facet normal is not primitive");
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (normals[i] == normals[j] && offsets[i] == offsets[j])
        throw GeometryError("duplicate facet (u, c)");

  {
    std::vector<QVec> rows;
    for (const IVec& u : normals) rows.push_back(to_qvec(u));
    if (rank_rational(rows) != n)
      throw GeometryError("normals do not span the ambient space: region is not full-dimensional");
  }

  // Boundedness: the recession cone {d : <d,u_i> >= 0 for all i} is pointed
  // (normals span), so if nonzero it has an extreme ray cut out by n-1
  // independent equalities.
  {
    auto in_recession = [&](const QVec& d) {
      for (const IVec& u : normals)
        if (dot(d, u) < 0) return false;
      return true;
    };
    std::vector<QVec> candidates;
    if (n == 1) {
      candidates.push_back(QVec{Rational(1)});
      candidates.push_back(QVec{Rational(-1)});
    } else {
      enumerate_subsets(r, n - 1, [&](const std::vector<std::size_t>& idx) {
        std::vector<QVec> rows;
        for (std::size_t i : idx) rows.push_back(to_qvec(normals[i]));
        auto ker = nullspace_rational(rows);
        if (ker.size() != 1) return;
        candidates.push_back(ker[0]);
        candidates.push_back(scale(ker[0], Rational(-1)));
      });
    }
    for (const QVec& d : candidates) {
      bool zero = true;
      for (const Rational& x : d) zero = zero && x == 0;
      if (!zero && in_recession(d)) throw GeometryError("region is unbounded");
    }
  }

  p.normals = std::move(normals);
  p.offsets = std::move(offsets);

  // Vertices: feasible solutions of n-subsets of facet equalities.
  std::set<QVec> vertex_set;
  enumerate_subsets(r, n, [&](const std::vector<std::size_t>& idx) {
    std::vector<QVec> rows;
    QVec rhs;
    for (std::size_t i : idx) {
      rows.push_back(to_qvec(p.normals[i]));
      rhs.push_back(-p.offsets[i]);
    }
    if (rank_rational(rows) != n) return;
    auto x = solve_rational(rows, rhs);
    if (x && p.contains(*x)) vertex_set.insert(*x);
  });
  if (vertex_set.empty()) throw GeometryError("region is empty");
  p.vertices.assign(vertex_set.begin(), vertex_set.end());

  for (const QVec& v : p.vertices) p.vertex_active.push_back(active_set(p.normals, p.offsets, v));

  // Full-dimensionality: the vertex barycenter is interior iff P has dim n.
  {
    QVec bc(n, Rational(0));
    for (const QVec& v : p.vertices) bc = add(bc, v);
    bc = scale(bc, Rational(1, Int(p.vertices.size())));
    bool interior = true;
    for (std::size_t i = 0; i < r; ++i)
      if (dot(bc, p.normals[i]) + p.offsets[i] <= 0) interior = false;
    p.full_dimensional = interior;
    if (!interior) {
      if (!allow_degenerate) throw GeometryError("region is not full-dimensional");
      p.degenerate = true;
    }
  }

  // Reject redundant constraints: every facet must carry an (n-1)-face.
  if (!p.degenerate) {
    for (std::size_t i = 0; i < r; ++i) {
      std::vector<QVec> on;
      for (std::size_t v = 0; v < p.vertices.size(); ++v)
        if (std::binary_search(p.vertex_active[v].begin(), p.vertex_active[v].end(), i))
          on.push_back(p.vertices[v]);
      if (affine_rank(on) != static_cast<int>(n) - 1)
        throw GeometryError("constraint " + std::to_string(i) + " is not facet-defining");
    }
  }

  p.lattice = true;
  for (const Rational& c : p.offsets) p.lattice = p.lattice && is_integer(c);
  for (const QVec& v : p.vertices)
    for (const Rational& x : v) p.lattice = p.lattice && is_integer(x);

  // Face lattice: close the facet sections under intersection; a face is
  // keyed by its vertex set, its active set is the set of facets containing
  // all of its vertices.
  std::set<std::vector<std::size_t>> seen;  // vertex id sets
  std::vector<std::vector<std::size_t>> pool;
  std::vector<std::size_t> all_ids(p.vertices.size());
  for (std::size_t i = 0; i < all_ids.size(); ++i) all_ids[i] = i;
  pool.push_back(all_ids);
  seen.insert(all_ids);
  for (std::size_t q = 0; q < pool.size(); ++q) {
    auto ids = pool[q];
    for (std::size_t fi = 0; fi < r; ++fi) {
      std::vector<std::size_t> cut;
      for (std::size_t vid : ids)
        if (std::binary_search(p.vertex_active[vid].begin(), p.vertex_active[vid].end(), fi))
          cut.push_back(vid);
      if (cut.empty() || cut == ids) continue;
      if (seen.insert(cut).second) pool.push_back(cut);
    }
  }
  for (const auto& ids : pool) {
    Face f;
    f.vertex_ids = ids;
    // active set = intersection of the vertices' active sets
    f.active = p.vertex_active[ids[0]];
    for (std::size_t k = 1; k < ids.size(); ++k) {
      std::vector<std::size_t> tmp;
      std::set_intersection(f.active.begin(), f.active.end(), p.vertex_active[ids[k]].begin(),
                            p.vertex_active[ids[k]].end(), std::back_inserter(tmp));
      f.active = std::move(tmp);
    }
    std::vector<QVec> pts;
    for (std::size_t vid : ids) pts.push_back(p.vertices[vid]);
    f.dim = affine_rank(pts);
    f.base_vertex_id = ids[0];
    std::vector<IVec> rows;
    for (std::size_t a : f.active) rows.push_back(p.normals[a]);
    f.span_basis = integer_kernel(rows, n);
    // For a face of dimension d the active normals cut out a d-dimensional
    // span; trim is unnecessary, the kernel rank always matches.
    if (static_cast<int>(f.span_basis.size()) != f.dim) {
      // degenerate regions may develop faces whose active sets over-cut
      if (!p.degenerate)
        throw GeometryError("face span/dimension mismatch (non-simple degeneracy?)");
    }
    p.faces.push_back(std::move(f));
  }
  std::sort(p.faces.begin(), p.faces.end(), [](const Face& a, const Face& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.vertex_ids < b.vertex_ids;
  });
  return p;
}

}  // namespace detail

inline LatticePolytope from_halfspaces(const std::vector<IVec>& normals, const IVec& offsets) {
  QVec off(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) off[i] = Rational(offsets[i]);
  return detail::build_from_halfspaces(normals, off, false);
}

/// Convex hull of integer points, n <= 4, at most 64 points.  Facets found by
/// scanning (n-1)-dimensional affine hulls of vertex subsets and keeping
/// supporting hyperplanes; the result round-trips through from_halfspaces.
inline LatticePolytope from_vertices(const std::vector<IVec>& points) {
  if (points.empty()) throw GeometryError("empty vertex list");
  if (points.size() > 64) throw ResourceError("more than 64 vertices exceeds the desk-scale cap");
  const std::size_t n = points[0].size();
  std::vector<QVec> qpts;
  for (const IVec& v : points) qpts.push_back(to_qvec(v));
  if (detail::affine_rank(qpts) != static_cast<int>(n))
    throw GeometryError("affine hull of the points is lower-dimensional");

  std::set<std::pair<IVec, Int>> facets;
  detail::enumerate_subsets(points.size(), n, [&](const std::vector<std::size_t>& idx) {
    // normal to the affine hull of the chosen n points, when that hull is a
    // hyperplane
    std::vector<QVec> rows;
    for (std::size_t k = 1; k < n; ++k) rows.push_back(sub(qpts[idx[k]], qpts[idx[0]]));
    QVec u_q;
    if (n == 1) {
      u_q = QVec{Rational(1)};
    } else {
      if (rank_rational(rows) != n - 1) return;
      auto ker = nullspace_rational(rows);
      if (ker.size() != 1) return;
      u_q = ker[0];
    }
    IVec u = to_primitive_int(u_q);
    // supporting side: all points on one side
    Int c0 = -dot(points[idx[0]], u);
    bool pos = true, neg = true;
    for (const IVec& m : points) {
      Int v = dot(m, u) + c0;
      if (v < 0) pos = false;
      if (v > 0) neg = false;
    }
    if (pos)
      facets.insert({u, c0});
    else if (neg) {
      IVec w(u);
      for (Int& x : w) x = -x;
      facets.insert({w, -c0});
    }
  });

  std::vector<IVec> normals;
  IVec offsets;
  for (const auto& [u, c] : facets) {
    normals.push_back(u);
    offsets.push_back(c);
  }
  LatticePolytope p = from_halfspaces(normals, offsets);
  // round-trip sanity: the hull's vertices are among the input points
  for (const QVec& v : p.vertices) {
    bool found = false;
    for (const QVec& q : qpts) found = found || q == v;
    if (!found) throw GeometryError("hull round-trip produced a foreign vertex");
  }
  return p;
}

/// P(h): same normals, offsets c + h.  The combinatorial type must be
/// preserved; verified by re-deriving the vertex active sets.
inline LatticePolytope dilate(const LatticePolytope& p, const DilationVector& h) {
  if (h.size() != p.facet_count()) throw GeometryError("dilation vector length != facet count");
  QVec off(p.offsets);
  for (std::size_t i = 0; i < off.size(); ++i) off[i] += h[i];
  LatticePolytope q = detail::build_from_halfspaces(p.normals, off, false);
  auto type = [](const LatticePolytope& x) {
    std::set<std::vector<std::size_t>> t;
    for (const auto& a : x.vertex_active) t.insert(a);
    return t;
  };
  if (type(p) != type(q))
    throw GeometryError("dilation changed the combinatorial type; shrink h");
  return q;
}

/// P_y(h): offsets (1+y) c + h.  At y = -1, h = 0 the region may collapse;
/// the degenerate flag is set instead of failing.
inline LatticePolytope dilate_y(const LatticePolytope& p, const Rational& y,
                                const DilationVector& h) {
  if (h.size() != p.facet_count()) throw GeometryError("dilation vector length != facet count");
  QVec off(p.offsets);
  for (std::size_t i = 0; i < off.size(); ++i) off[i] = (Rational(1) + y) * off[i] + h[i];
  LatticePolytope q = detail::build_from_halfspaces(p.normals, off, true);
  if (!q.degenerate) {
    auto type = [](const LatticePolytope& x) {
      std::set<std::vector<std::size_t>> t;
      for (const auto& a : x.vertex_active) t.insert(a);
      return t;
    };
    if (type(p) != type(q))
      throw GeometryError("parametrized dilation changed the combinatorial type; shrink h");
  }
  return q;
}

/// Integer dilation l*P (offsets and vertices scale by l).
inline LatticePolytope scale_polytope(const LatticePolytope& p, const Int& l) {
  if (l <= 0) throw GeometryError("scale factor must be positive");
  QVec off(p.offsets);
  for (Rational& c : off) c *= Rational(l);
  return detail::build_from_halfspaces(p.normals, off, false);
}

namespace detail {

/// Recursive triangulation of a face by vertex ids: cone from the base
/// vertex over the triangulations of the subfacets avoiding it.
inline void triangulate_face(const LatticePolytope& p, const Face& f,
                             std::vector<std::vector<std::size_t>>& out) {
  if (f.dim <= 0) {
    out.push_back({f.base_vertex_id});
    return;
  }
  std::size_t v0 = f.base_vertex_id;
  for (const Face& g : p.faces) {
    if (g.dim != f.dim - 1) continue;
    if (!std::includes(f.vertex_ids.begin(), f.vertex_ids.end(), g.vertex_ids.begin(),
                       g.vertex_ids.end()))
      continue;
    if (std::binary_search(g.vertex_ids.begin(), g.vertex_ids.end(), v0)) continue;
    std::vector<std::vector<std::size_t>> sub;
    triangulate_face(p, g, sub);
    for (auto& s : sub) {
      s.push_back(v0);
      out.push_back(std::move(s));
    }
  }
}

/// Coordinates of x - base in the face's span basis.
inline QVec span_coordinates(const Face& f, const QVec& x, const QVec& base) {
  std::size_t n = base.size(), d = f.span_basis.size();
  std::vector<QVec> rows(n, QVec(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) rows[i][j] = Rational(f.span_basis[j][i]);
  QVec rhs = sub(x, base);
  auto s = solve_rational(rows, rhs);
  if (!s) throw GeometryError("point does not lie in the face span");
  return *s;
}

}  // namespace detail

/// Exact lattice-normalized volume of a face (unit cube of Span(E-m0) ∩ M has
/// volume 1).  Dim-0 faces carry volume 1 by convention.
inline Rational volume(const LatticePolytope& p, const Face& f) {
  if (f.dim <= 0) return 1;
  std::vector<std::vector<std::size_t>> simplices;
  detail::triangulate_face(p, f, simplices);
  const QVec base = p.vertices[f.base_vertex_id];
  Rational vol = 0;
  std::size_t d = static_cast<std::size_t>(f.dim);
  for (const auto& simplex : simplices) {
    std::vector<QVec> scoords;
    for (std::size_t vid : simplex) scoords.push_back(detail::span_coordinates(f, p.vertices[vid], base));
    std::vector<QVec> rows;
    for (std::size_t k = 1; k <= d; ++k) rows.push_back(sub(scoords[k], scoords[0]));
    // rational determinant by elimination
    Rational det = 1;
    std::vector<QVec> m(rows);
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t piv = c;
      while (piv < d && m[piv][c] == 0) ++piv;
      if (piv == d) {
        det = 0;
        break;
      }
      if (piv != c) {
        std::swap(m[piv], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (std::size_t i = c + 1; i < d; ++i) {
        Rational fct = m[i][c] / m[c][c];
        for (std::size_t j = c; j < d; ++j) m[i][j] -= fct * m[c][j];
      }
    }
    vol += (det < 0 ? -det : det) / factorial(static_cast<unsigned>(d));
  }
  return vol;
}

inline Rational volume(const LatticePolytope& p) {
  return volume(p, p.faces[p.whole_face_index()]);
}

/// Exact integral of an ambient polynomial over a face, against the
/// lattice-normalized measure of the face span.  Dim-0 faces integrate to
/// f(v).
inline Rational integrate_polynomial(const LatticePolytope& p, const Face& f, const QPoly& poly) {
  if (poly.nvars != p.n) throw GeometryError("polynomial arity != ambient dimension");
  if (f.dim <= 0) {
    return poly.eval(p.vertices[f.base_vertex_id]);
  }
  const std::size_t d = static_cast<std::size_t>(f.dim);
  const QVec base = p.vertices[f.base_vertex_id];

  // Ambient coordinates as affine functions of span coordinates s.
  std::vector<QPoly> images;
  for (std::size_t i = 0; i < p.n; ++i) {
    QPoly g = QPoly::constant(d, base[i]);
    for (std::size_t j = 0; j < d; ++j)
      g += QPoly::variable(d, j).scaled(Rational(f.span_basis[j][i]));
    images.push_back(g);
  }
  QPoly fs = poly.subst_affine(images);

  std::vector<std::vector<std::size_t>> simplices;
  detail::triangulate_face(p, f, simplices);
  Rational total = 0;
  for (const auto& simplex : simplices) {
    std::vector<QVec> sc;
    for (std::size_t vid : simplex) sc.push_back(detail::span_coordinates(f, p.vertices[vid], base));
    // s = s0 + T t
    std::vector<QPoly> timg;
    for (std::size_t i = 0; i < d; ++i) {
      QPoly g = QPoly::constant(d, sc[0][i]);
      for (std::size_t j = 0; j < d; ++j) g += QPoly::variable(d, j).scaled(sc[j + 1][i] - sc[0][i]);
      timg.push_back(g);
    }
    QPoly ft = fs.subst_affine(timg);
    // |det T|
    std::vector<QVec> rows;
    for (std::size_t k = 1; k <= d; ++k) rows.push_back(sub(sc[k], sc[0]));
    Rational det = 1;
    {
      std::vector<QVec> m(rows);
      for (std::size_t c = 0; c < d; ++c) {
        std::size_t piv = c;
        while (piv < d && m[piv][c] == 0) ++piv;
        if (piv == d) {
          det = 0;
          break;
        }
        if (piv != c) {
          std::swap(m[piv], m[c]);
          det = -det;
        }
        det *= m[c][c];
        for (std::size_t i = c + 1; i < d; ++i) {
          Rational fct = m[i][c] / m[c][c];
          for (std::size_t j = c; j < d; ++j) m[i][j] -= fct * m[c][j];
        }
      }
      if (det < 0) det = -det;
    }
    if (det == 0) continue;
    // \int_{std simplex} prod t_i^{a_i} dt = prod a_i! / (d + sum a_i)!
    Rational s = 0;
    for (const auto& [e, c] : ft.terms) {
      Rational num = 1;
      unsigned tot = 0;
      for (unsigned a : e) {
        num *= factorial(a);
        tot += a;
      }
      s += c * num / factorial(static_cast<unsigned>(d) + tot);
    }
    total += det * s;
  }
  return total;
}

inline Rational integrate_polynomial(const LatticePolytope& p, const QPoly& poly) {
  return integrate_polynomial(p, p.faces[p.whole_face_index()], poly);
}

/// Simple: every vertex lies on exactly n facets.
inline bool is_simple(const LatticePolytope& p) {
  if (!p.full_dimensional) throw GeometryError("simplicity is defined for full-dimensional P");
  for (const auto& a : p.vertex_active)
    if (a.size() != p.n) return false;
  return true;
}

/// Delzant: simple with unimodular vertex cones.
inline bool is_delzant(const LatticePolytope& p) {
  if (!is_simple(p)) return false;
  for (const auto& a : p.vertex_active) {
    IntMatrix m(p.n, p.n);
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t j = 0; j < p.n; ++j) m(i, j) = p.normals[a[i]][j];
    if (abs_int(det_int(m)) != 1) return false;
  }
  return true;
}

}  // namespace latticetodd
