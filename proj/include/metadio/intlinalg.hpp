#pragma once

// Integer linear algebra: Smith normal form, exact solution lattices of
// A x = b over Z, solvability of A x = b (mod m), and substitution of
// parametrized solutions into affine forms.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metadio/affine.hpp"
#include "metadio/rings.hpp"

namespace metadio {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Int> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("IntMatrix: entry count does not match dimensions");
  }
  static IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    std::size_t r = rows.size(), c = rows.empty() ? 0 : rows[0].size();
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("IntMatrix: ragged rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Int& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[dst] += f * row[src]
  void add_row(std::size_t dst, std::size_t src, const Int& f) {
    if (f == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += f * (*this)(src, j);
  }
  void add_col(std::size_t dst, std::size_t src, const Int& f) {
    if (f == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += f * (*this)(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix: dimension mismatch in product");
    IntMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Int& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  std::vector<Int> apply(const std::vector<Int>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("IntMatrix: dimension mismatch in apply");
    std::vector<Int> r(rows_, Int(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * x[j];
    return r;
  }
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

// Bareiss fraction-free determinant.
inline Int determinant(IntMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SnfResult {
  IntMatrix U;  // rows x rows, unimodular
  IntMatrix D;  // rows x cols, diagonal
  IntMatrix V;  // cols x cols, unimodular
  std::size_t rank = 0;
};

// U * A * V = D with d_1 | d_2 | ... >= 0. Pivots are the smallest nonzero
// absolute value, ties broken by lowest row then lowest column.
inline SnfResult smith_normal_form(const IntMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols();
  IntMatrix D = A, U = IntMatrix::identity(m), V = IntMatrix::identity(n);
  std::size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    for (;;) {
      // choose pivot in the trailing block
      std::optional<std::pair<std::size_t, std::size_t>> piv;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j) {
          if (D(i, j) == 0) continue;
          if (!piv || int_abs(D(i, j)) < int_abs(D(piv->first, piv->second))) piv = {i, j};
        }
      if (!piv) goto done;
      D.swap_rows(t, piv->first);
      U.swap_rows(t, piv->first);
      D.swap_cols(t, piv->second);
      V.swap_cols(t, piv->second);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (D(i, t) == 0) continue;
        Int q = int_floor_div(D(i, t), D(t, t));
        D.add_row(i, t, -q);
        U.add_row(i, t, -q);
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (D(t, j) == 0) continue;
        Int q = int_floor_div(D(t, j), D(t, t));
        D.add_col(j, t, -q);
        V.add_col(j, t, -q);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility: fold an offending row into row t and retry
      bool divisible = true;
      for (std::size_t i = t + 1; i < m && divisible; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!int_divides(D(t, t), D(i, j))) {
            D.add_row(t, i, 1);
            U.add_row(t, i, 1);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (D(t, t) < 0) {
      D.negate_row(t);
      U.negate_row(t);
    }
  }
done:
  return {std::move(U), std::move(D), std::move(V), t};
}

// Row `row` of the diagonalized system reads divisor * y = value with no
// integer solution (divisor == 0 means the row is 0 = value).
struct InfeasibleRow {
  std::size_t row = 0;
  Int divisor;
  Int value;
  friend bool operator==(const InfeasibleRow&, const InfeasibleRow&) = default;
};

struct LinearSolutionSet {
  bool empty = false;
  std::vector<Int> particular;
  std::vector<std::vector<Int>> basis;
  std::optional<InfeasibleRow> certificate;
};

inline LinearSolutionSet solve_linear(const IntMatrix& A, const std::vector<Int>& b) {
  if (b.size() != A.rows()) throw std::invalid_argument("solve_linear: right-hand side has wrong length");
  SnfResult snf = smith_normal_form(A);
  std::vector<Int> c = snf.U.apply(b);
  LinearSolutionSet out;
  std::vector<Int> y(A.cols(), Int(0));
  for (std::size_t i = 0; i < A.rows(); ++i) {
    Int d = i < snf.rank ? snf.D(i, i) : Int(0);
    if (!int_divides(d, c[i])) {
      out.empty = true;
      out.certificate = InfeasibleRow{i, d, c[i]};
      return out;
    }
    if (i < snf.rank) y[i] = c[i] / d;
  }
  out.particular = snf.V.apply(y);
  for (std::size_t j = snf.rank; j < A.cols(); ++j) {
    std::vector<Int> v(A.cols());
    for (std::size_t i = 0; i < A.cols(); ++i) v[i] = snf.V(i, j);
    out.basis.push_back(std::move(v));
  }
  return out;
}

// Does A x = b (mod modulus) have a solution?
inline bool solvable_mod(const IntMatrix& A, const std::vector<Int>& b, const Int& modulus) {
  SnfResult snf = smith_normal_form(A);
  std::vector<Int> c = snf.U.apply(b);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    Int d = i < snf.rank ? snf.D(i, i) : Int(0);
    if (!int_divides(int_gcd(d, modulus), c[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Named-variable front end: equations are affine forms set to zero.

struct Parametrization {
  std::vector<std::string> variables;  // variables constrained by the system
  std::vector<std::string> params;     // fresh names, one per basis vector
  LinearSolutionSet solution;
  Substitution values;                 // variable -> affine form over params

  bool empty() const { return solution.empty; }
};

inline Parametrization parametrize(const std::vector<AffineForm>& equations, const std::string& param_prefix) {
  Parametrization p;
  std::set<std::string> vars;
  for (const auto& e : equations) {
    auto vs = e.variables();
    vars.insert(vs.begin(), vs.end());
  }
  p.variables.assign(vars.begin(), vars.end());
  IntMatrix A(equations.size(), p.variables.size());
  std::vector<Int> b(equations.size());
  for (std::size_t i = 0; i < equations.size(); ++i) {
    for (std::size_t j = 0; j < p.variables.size(); ++j) A(i, j) = equations[i].coeff(p.variables[j]);
    b[i] = -equations[i].constant();
  }
  p.solution = solve_linear(A, b);
  if (p.solution.empty) return p;
  for (std::size_t j = 0; j < p.solution.basis.size(); ++j) p.params.push_back(param_prefix + std::to_string(j));
  for (std::size_t i = 0; i < p.variables.size(); ++i) {
    AffineForm f(p.solution.particular[i]);
    for (std::size_t j = 0; j < p.solution.basis.size(); ++j) f.add(p.params[j], p.solution.basis[j][i]);
    p.values.emplace(p.variables[i], std::move(f));
  }
  return p;
}

// Rewrite forms over the free parameters; variables the solution does not
// constrain are left in place.
inline std::vector<AffineForm> apply_solution(const Parametrization& sol, const std::vector<AffineForm>& forms) {
  if (sol.empty()) throw std::invalid_argument("apply_solution: empty solution set");
  std::vector<AffineForm> out;
  out.reserve(forms.size());
  for (const auto& f : forms) out.push_back(f.substitute(sol.values));
  return out;
}

}  // namespace metadio
