#pragma once

/// Exact integer linear algebra: dense matrices over arbitrary-precision
/// integers, Smith normal form with unimodular witnesses, and finitely
/// generated abelian groups presented as cokernels.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <tri3/core.hpp>

namespace tri3 {

using Integer = boost::multiprecision::cpp_int;

/// Dense row-major integer matrix.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntegerMatrix identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCategory::domain, "matrix shape mismatch");
    IntegerMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  IntegerMatrix transposed() const {
    IntegerMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  void swap_rows(std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
  }
  /// row i += c * row j
  void add_row(std::size_t i, std::size_t j, const Integer& c) {
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) += c * (*this)(j, k);
  }
  /// col i += c * col j
  void add_col(std::size_t i, std::size_t j, const Integer& c) {
    for (std::size_t k = 0; k < rows_; ++k) (*this)(k, i) += c * (*this)(k, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) = -(*this)(i, k);
  }
  void negate_col(std::size_t i) {
    for (std::size_t k = 0; k < rows_; ++k) (*this)(k, i) = -(*this)(k, i);
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(IntegerMatrix a) {
  if (a.rows() != a.cols()) throw Error(ErrorCategory::domain, "determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t pivot = n;
      for (std::size_t i = k + 1; i < n; ++i)
        if (a(i, k) != 0) {
          pivot = i;
          break;
        }
      if (pivot == n) return 0;
      a.swap_rows(k, pivot);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

/// U * A * V = S with S diagonal, each diagonal entry nonnegative and
/// dividing the next, and U, V unimodular.
struct SmithDecomposition {
  IntegerMatrix U, S, V;
  std::vector<Integer> diagonal;  ///< the nonzero diagonal entries of S
  std::size_t rank = 0;
};

inline SmithDecomposition smith_normal_form(const IntegerMatrix& input) {
  SmithDecomposition out;
  out.S = input;
  out.U = IntegerMatrix::identity(input.rows());
  out.V = IntegerMatrix::identity(input.cols());
  IntegerMatrix& s = out.S;

  const std::size_t bound = std::min(input.rows(), input.cols());
  for (std::size_t k = 0; k < bound; ++k) {
    for (;;) {
      // move a nonzero entry of smallest magnitude in the trailing block to (k, k)
      std::size_t pi = s.rows(), pj = s.cols();
      for (std::size_t i = k; i < s.rows(); ++i)
        for (std::size_t j = k; j < s.cols(); ++j)
          if (s(i, j) != 0 &&
              (pi == s.rows() || abs(s(i, j)) < abs(s(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == s.rows()) goto done;  // trailing block is zero
      if (pi != k) {
        s.swap_rows(k, pi);
        out.U.swap_rows(k, pi);
      }
      if (pj != k) {
        s.swap_cols(k, pj);
        out.V.swap_cols(k, pj);
      }

      bool clean = true;
      for (std::size_t i = k + 1; i < s.rows(); ++i)
        if (s(i, k) != 0) {
          const Integer q = s(i, k) / s(k, k);
          if (q != 0) {
            s.add_row(i, k, -q);
            out.U.add_row(i, k, -q);
          }
          if (s(i, k) != 0) clean = false;  // remainder became the new minimum
        }
      for (std::size_t j = k + 1; j < s.cols(); ++j)
        if (s(k, j) != 0) {
          const Integer q = s(k, j) / s(k, k);
          if (q != 0) {
            s.add_col(j, k, -q);
            out.V.add_col(j, k, -q);
          }
          if (s(k, j) != 0) clean = false;
        }
      if (!clean) continue;

      // enforce divisibility of every remaining entry by the pivot
      bool divisible = true;
      for (std::size_t i = k + 1; i < s.rows() && divisible; ++i)
        for (std::size_t j = k + 1; j < s.cols() && divisible; ++j)
          if (s(i, j) % s(k, k) != 0) {
            s.add_row(k, i, 1);
            out.U.add_row(k, i, 1);
            divisible = false;
          }
      if (divisible) break;
    }
    if (s(k, k) < 0) {
      s.negate_row(k);
      out.U.negate_row(k);
    }
  }
done:
  for (std::size_t k = 0; k < bound; ++k)
    if (s(k, k) != 0) out.diagonal.push_back(s(k, k));
  out.rank = out.diagonal.size();
  return out;
}

/// A finitely generated abelian group: free rank plus invariant factors,
/// each greater than one and dividing the next.
struct AbelianGroup {
  std::size_t rank = 0;
  std::vector<Integer> torsion;

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;

  /// Render as, for example, "Z^2 + Z/3 + Z/6", or "0" for the trivial group.
  std::string to_string() const {
    std::string out;
    const auto append = [&out](const std::string& part) {
      if (!out.empty()) out += " + ";
      out += part;
    };
    if (rank == 1)
      append("Z");
    else if (rank > 1)
      append("Z^" + std::to_string(rank));
    for (const Integer& t : torsion) append("Z/" + t.str());
    if (out.empty()) out = "0";
    return out;
  }
};

/// The quotient of Z^rows(A) by the span of the columns of A.
inline AbelianGroup cokernel(const IntegerMatrix& a) {
  const SmithDecomposition snf = smith_normal_form(a);
  AbelianGroup g;
  g.rank = a.rows() - snf.rank;
  for (const Integer& d : snf.diagonal)
    if (d > 1) g.torsion.push_back(d);
  return g;
}

/// Direct sum of two abelian groups, merging torsion back into invariant
/// factor form.
inline AbelianGroup direct_sum(const AbelianGroup& a, const AbelianGroup& b) {
  // present the sum as a diagonal relation matrix and renormalize
  const std::size_t t = a.torsion.size() + b.torsion.size();
  IntegerMatrix rel(t, t);
  std::size_t k = 0;
  for (const Integer& d : a.torsion) rel(k, k) = d, ++k;
  for (const Integer& d : b.torsion) rel(k, k) = d, ++k;
  AbelianGroup out = cokernel(rel);
  out.rank = a.rank + b.rank;
  return out;
}

}  // namespace tri3
