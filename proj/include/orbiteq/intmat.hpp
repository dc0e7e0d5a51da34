#pragma once

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "checked.hpp"
#include "matrix.hpp"

namespace orbiteq {

/// Dense integer matrix with checked arithmetic.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols, Int fill = 0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}
  IntMatrix(std::vector<std::vector<Int>> const &rows) : IntMatrix(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size())) {
    for (int i = 0; i < rows_; ++i) {
      if (static_cast<int>(rows[i].size()) != cols_) throw std::invalid_argument("ragged matrix");
      for (int j = 0; j < cols_; ++j) (*this)(i, j) = rows[i][j];
    }
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix from(TransitionMatrix const &a) {
    IntMatrix m(a.size(), a.size());
    for (int i = 0; i < a.size(); ++i)
      for (int j = 0; j < a.size(); ++j) m(i, j) = a(i + 1, j + 1) ? 1 : 0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Int &operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  Int operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

  IntMatrix transposed() const {
    IntMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend IntMatrix operator*(IntMatrix const &x, IntMatrix const &y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    IntMatrix r(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        Int xik = x(i, k);
        if (xik == 0) continue;
        for (int j = 0; j < y.cols_; ++j) r(i, j) = add_checked(r(i, j), mul_checked(xik, y(k, j)));
      }
    return r;
  }

  friend IntMatrix operator-(IntMatrix const &x, IntMatrix const &y) {
    IntMatrix r(x.rows_, x.cols_);
    for (std::size_t i = 0; i < x.data_.size(); ++i) r.data_[i] = sub_checked(x.data_[i], y.data_[i]);
    return r;
  }

  std::vector<Int> apply(std::vector<Int> const &v) const {
    std::vector<Int> out(static_cast<std::size_t>(rows_), 0);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        out[static_cast<std::size_t>(i)] = add_checked(out[static_cast<std::size_t>(i)], mul_checked((*this)(i, j), v[static_cast<std::size_t>(j)]));
    return out;
  }

  friend bool operator==(IntMatrix const &, IntMatrix const &) = default;

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < rows_; ++i) {
      s += i ? ",[" : "[";
      for (int j = 0; j < cols_; ++j) s += (j ? "," : "") + std::to_string((*this)(i, j));
      s += "]";
    }
    return s + "]";
  }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

inline IntMatrix power(IntMatrix const &m, int e) {
  IntMatrix r = IntMatrix::identity(m.rows());
  for (int i = 0; i < e; ++i) r = r * m;
  return r;
}

/// Fraction-free (Bareiss) determinant.
inline Int determinant(IntMatrix m) {
  int const n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(swap, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m(i, j) = sub_checked(mul_checked(m(i, j), m(k, k)), mul_checked(m(i, k), m(k, j))) / prev;
    prev = m(k, k);
  }
  return mul_checked(sign, m(n - 1, n - 1));
}

/// Rank over the rationals, by fraction-free elimination.
inline int rank(IntMatrix m) {
  int r = 0;
  Int prev = 1;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int pivot = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m(i, c) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    for (int j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(pivot, j));
    for (int i = r + 1; i < m.rows(); ++i) {
      for (int j = c + 1; j < m.cols(); ++j)
        m(i, j) = sub_checked(mul_checked(m(i, j), m(r, c)), mul_checked(m(i, c), m(r, j))) / prev;
      m(i, c) = 0;
    }
    prev = m(r, c);
    ++r;
  }
  return r;
}

/// Integer polynomial, coefficients from the constant term upward.
using Polynomial = std::vector<Int>;

inline void trim(Polynomial &p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

/// "t^2 - 2t" style rendering in the variable t.
inline std::string format_polynomial(Polynomial const &p) {
  std::string out;
  for (std::size_t i = p.size(); i-- > 0;) {
    Int c = p[i];
    if (c == 0) continue;
    bool first = out.empty();
    if (!first) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "-";
    Int mag = c < 0 ? -c : c;
    if (mag != 1 || i == 0) out += std::to_string(mag);
    if (i >= 1) out += "t";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

/// det(tI - M) by Faddeev–LeVerrier; every division is exact over Z.
inline Polynomial characteristic_polynomial(IntMatrix const &m) {
  int const n = m.rows();
  Polynomial c(static_cast<std::size_t>(n + 1), 0);
  c[static_cast<std::size_t>(n)] = 1;
  IntMatrix mk(n, n); // M_0 = 0
  for (int k = 1; k <= n; ++k) {
    // M_k = M·M_{k-1} + c_{n-k+1} I
    IntMatrix next = m * mk;
    for (int i = 0; i < n; ++i) next(i, i) = add_checked(next(i, i), c[static_cast<std::size_t>(n - k + 1)]);
    mk = next;
    IntMatrix am = m * mk;
    Int tr = 0;
    for (int i = 0; i < n; ++i) tr = add_checked(tr, am(i, i));
    if (tr % k != 0) throw std::logic_error("Faddeev-LeVerrier: inexact division");
    c[static_cast<std::size_t>(n - k)] = -tr / k;
  }
  return c;
}

/// Smith normal form U·M·V = D with U, V unimodular and D diagonal with
/// d1 | d2 | ... (nonnegative).
struct SmithForm {
  IntMatrix u, v, d;
  std::vector<Int> diagonal() const {
    std::vector<Int> out;
    for (int i = 0; i < std::min(d.rows(), d.cols()); ++i) out.push_back(d(i, i));
    return out;
  }
};

inline SmithForm smith_normal_form(IntMatrix const &m) {
  int const rows = m.rows(), cols = m.cols();
  SmithForm s{IntMatrix::identity(rows), IntMatrix::identity(cols), m};
  IntMatrix &d = s.d;
  auto row_op = [&](int i, int j, Int a, Int b, Int c, Int e) {
    // (row i, row j) <- (a*ri + b*rj, c*ri + e*rj)
    for (int k = 0; k < cols; ++k) {
      Int x = d(i, k), y = d(j, k);
      d(i, k) = add_checked(mul_checked(a, x), mul_checked(b, y));
      d(j, k) = add_checked(mul_checked(c, x), mul_checked(e, y));
    }
    for (int k = 0; k < rows; ++k) {
      Int x = s.u(i, k), y = s.u(j, k);
      s.u(i, k) = add_checked(mul_checked(a, x), mul_checked(b, y));
      s.u(j, k) = add_checked(mul_checked(c, x), mul_checked(e, y));
    }
  };
  auto col_op = [&](int i, int j, Int a, Int b, Int c, Int e) {
    for (int k = 0; k < rows; ++k) {
      Int x = d(k, i), y = d(k, j);
      d(k, i) = add_checked(mul_checked(a, x), mul_checked(b, y));
      d(k, j) = add_checked(mul_checked(c, x), mul_checked(e, y));
    }
    for (int k = 0; k < cols; ++k) {
      Int x = s.v(k, i), y = s.v(k, j);
      s.v(k, i) = add_checked(mul_checked(a, x), mul_checked(b, y));
      s.v(k, j) = add_checked(mul_checked(c, x), mul_checked(e, y));
    }
  };

  int const steps = std::min(rows, cols);
  for (int t = 0; t < steps; ++t) {
    // pivot: smallest nonzero magnitude in the remaining block
    int pi = -1, pj = -1;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j)
        if (d(i, j) != 0 && (pi < 0 || std::llabs(d(i, j)) < std::llabs(d(pi, pj)))) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    if (pi != t) row_op(t, pi, 0, 1, 1, 0);
    if (pj != t) col_op(t, pj, 0, 1, 1, 0);
    bool done = false;
    while (!done) {
      done = true;
      for (int i = t + 1; i < rows; ++i) {
        if (d(i, t) == 0) continue;
        if (d(i, t) % d(t, t) == 0) {
          row_op(t, i, 1, 0, -(d(i, t) / d(t, t)), 1);
          continue;
        }
        Int x, y;
        Int g = extended_gcd(d(t, t), d(i, t), x, y);
        Int a = d(t, t) / g, b = d(i, t) / g;
        row_op(t, i, x, y, -b, a);
      }
      for (int j = t + 1; j < cols; ++j) {
        if (d(t, j) == 0) continue;
        if (d(t, j) % d(t, t) == 0) {
          col_op(t, j, 1, 0, -(d(t, j) / d(t, t)), 1);
          continue;
        }
        Int x, y;
        Int g = extended_gcd(d(t, t), d(t, j), x, y);
        Int a = d(t, t) / g, b = d(t, j) / g;
        col_op(t, j, x, y, -b, a);
        done = false;
      }
      if (!done) continue;
      for (int i = t + 1; i < rows && done; ++i)
        if (d(i, t) != 0) done = false;
      if (!done) continue;
      // divisibility: fold any entry not divisible by the pivot into row t
      for (int i = t + 1; i < rows && done; ++i)
        for (int j = t + 1; j < cols && done; ++j)
          if (d(i, j) % d(t, t) != 0) {
            row_op(t, i, 1, 1, 0, 1);
            done = false;
          }
    }
    if (d(t, t) < 0) {
      for (int k = 0; k < cols; ++k) d(t, k) = -d(t, k);
      for (int k = 0; k < rows; ++k) s.u(t, k) = -s.u(t, k);
    }
  }
  return s;
}

} // namespace orbiteq
