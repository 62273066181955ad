#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cassert>
#include <optional>
#include <tuple>

namespace latticetodd {

/// Dense matrix of arbitrary-precision integers, row-major.
struct IntMatrix {
  std::size_t rows = 0, cols = 0;
  IVec data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Int(0)) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix from_rows(const std::vector<IVec>& rws) {
    IntMatrix m(rws.size(), rws.empty() ? 0 : rws[0].size());
    for (std::size_t i = 0; i < rws.size(); ++i) {
      assert(rws[i].size() == m.cols);
      for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rws[i][j];
    }
    return m;
  }

  Int& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  IVec row(std::size_t i) const { return IVec(data.begin() + i * cols, data.begin() + (i + 1) * cols); }

  bool operator==(const IntMatrix& o) const { return rows == o.rows && cols == o.cols && data == o.data; }
};

inline IntMatrix mul(const IntMatrix& a, const IntMatrix& b) {
  assert(a.cols == b.rows);
  IntMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Int& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Int det_int(IntMatrix a) {
  assert(a.rows == a.cols);
  std::size_t n = a.rows;
  // Bareiss fraction-free elimination.
  Int prev = 1, sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return n == 0 ? Int(sign) : Int(sign * a(n - 1, n - 1));
}

/// v / gcd(entries); the unique primitive vector on the same ray.
inline IVec primitive(const IVec& v) {
  Int g = 0;
  for (const Int& x : v) g = gcd(g, x);
  if (g == 0) throw std::invalid_argument("primitive: zero vector");
  IVec r(v);
  for (Int& x : r) x /= g;
  return r;
}

inline Int dot(const IVec& a, const IVec& b) {
  assert(a.size() == b.size());
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const QVec& a, const IVec& b) {
  assert(a.size() == b.size());
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * Rational(b[i]);
  return s;
}

inline Rational dot(const QVec& a, const QVec& b) {
  assert(a.size() == b.size());
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline QVec to_qvec(const IVec& v) {
  QVec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
  return r;
}

/// Smith normal form: U*A*V = D, U and V unimodular, D diagonal with
/// d_1 | d_2 | ... and nonnegative entries.
struct SmithForm {
  IntMatrix d, u, v;
};

inline SmithForm snf(IntMatrix a) {
  const std::size_t m = a.rows, n = a.cols;
  IntMatrix u = IntMatrix::identity(m), v = IntMatrix::identity(n);

  auto row_swap = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < n; ++k) std::swap(a(i, k), a(j, k));
    for (std::size_t k = 0; k < m; ++k) std::swap(u(i, k), u(j, k));
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < m; ++k) std::swap(a(k, i), a(k, j));
    for (std::size_t k = 0; k < n; ++k) std::swap(v(k, i), v(k, j));
  };
  auto row_axpy = [&](std::size_t dst, std::size_t src, const Int& c) {
    for (std::size_t k = 0; k < n; ++k) a(dst, k) -= c * a(src, k);
    for (std::size_t k = 0; k < m; ++k) u(dst, k) -= c * u(src, k);
  };
  auto col_axpy = [&](std::size_t dst, std::size_t src, const Int& c) {
    for (std::size_t k = 0; k < m; ++k) a(k, dst) -= c * a(k, src);
    for (std::size_t k = 0; k < n; ++k) v(k, dst) -= c * v(k, src);
  };
  auto row_neg = [&](std::size_t i) {
    for (std::size_t k = 0; k < n; ++k) a(i, k) = -a(i, k);
    for (std::size_t k = 0; k < m; ++k) u(i, k) = -u(i, k);
  };

  std::size_t t = 0;
  while (t < m && t < n) {
    // Pivot: smallest nonzero |entry| in the remaining block.
    std::size_t pi = t, pj = t;
    bool found = false;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (a(i, j) != 0 && (!found || abs_int(a(i, j)) < abs_int(a(pi, pj)))) {
          pi = i, pj = j, found = true;
        }
    if (!found) break;
    if (pi != t) row_swap(t, pi);
    if (pj != t) col_swap(t, pj);

    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a(i, t) == 0) continue;
        Int q = floor_div(a(i, t), a(t, t));
        row_axpy(i, t, q);
        if (a(i, t) != 0) {
          row_swap(t, i);  // remainder is smaller, keep reducing
          dirty = true;
        }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        Int q = floor_div(a(t, j), a(t, t));
        col_axpy(j, t, q);
        if (a(t, j) != 0) {
          col_swap(t, j);
          dirty = true;
        }
      }
    }
    if (a(t, t) < 0) row_neg(t);
    ++t;
  }

  // Enforce the divisibility chain d_k | d_{k+1}.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k + 1 < t; ++k) {
      if (a(k + 1, k + 1) % a(k, k) == 0) continue;
      // Fold entry (k+1,k+1) into column k, then re-clear the 2x2 block.
      col_axpy(k, k + 1, Int(-1));
      Int x = a(k, k), y = a(k + 1, k);
      // gcd step on rows k, k+1 in column k.
      while (y != 0) {
        Int q = floor_div(x, y);
        row_axpy(k, k + 1, q);
        row_swap(k, k + 1);
        x = a(k, k), y = a(k + 1, k);
      }
      // clear the off-diagonal remnants
      if (a(k, k + 1) != 0) col_axpy(k + 1, k, a(k, k + 1) / a(k, k));
      if (a(k + 1, k + 1) == 0) { /* cannot happen: rank preserved */
      }
      if (a(k, k) < 0) row_neg(k);
      if (a(k + 1, k + 1) < 0) row_neg(k + 1);
      changed = true;
    }
  }
  return {a, u, v};
}

/// Exact solve A x = b over Q; nullopt when the system is inconsistent.
/// When underdetermined, returns one solution (free variables at 0).
inline std::optional<QVec> solve_rational(std::vector<QVec> a, QVec b) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    Rational inv = a[r][c];
    for (std::size_t j = c; j < n; ++j) a[r][j] /= inv;
    b[r] /= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < m; ++i)
    if (b[i] != 0) return std::nullopt;
  QVec x(n, Rational(0));
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
  return x;
}

inline std::size_t rank_rational(std::vector<QVec> a) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < m; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

/// Basis of the rational nullspace {x : A x = 0}.
inline std::vector<QVec> nullspace_rational(std::vector<QVec> a) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::vector<std::size_t> pivot_of_col(n, SIZE_MAX);
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(a[p], a[r]);
    Rational inv = a[r][c];
    for (std::size_t j = c; j < n; ++j) a[r][j] /= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_of_col[c] = r;
    ++r;
  }
  std::vector<QVec> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (pivot_of_col[c] != SIZE_MAX) continue;
    QVec v(n, Rational(0));
    v[c] = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (pivot_of_col[j] != SIZE_MAX) v[j] = -a[pivot_of_col[j]][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Clears denominators and rescales to a primitive integer vector.
inline IVec to_primitive_int(const QVec& v) {
  Int l = 1;
  for (const Rational& q : v) l = lcm(l, den(q));
  IVec w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = num(v[i]) * (l / den(v[i]));
  return primitive(w);
}

inline IVec add(const IVec& a, const IVec& b) {
  IVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline IVec sub(const IVec& a, const IVec& b) {
  IVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline QVec add(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline QVec sub(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline QVec scale(const QVec& a, const Rational& c) {
  QVec r(a);
  for (Rational& x : r) x *= c;
  return r;
}

}  // namespace latticetodd
