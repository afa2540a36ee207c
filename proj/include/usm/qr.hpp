#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usm/assembly.hpp"
#include "usm/scalar.hpp"

namespace usm {

// Explicit Q, dense inverses and condition numbers refuse larger systems.
inline constexpr std::size_t kDenseCutoff = 4096;

// Rotation of rows (row, row + 1):
//   [x_row; x_row+1] <- [c s; -s c] [x_row; x_row+1]
template <class T>
struct GivensRotation {
  std::size_t row = 0;
  std::size_t col = 0;  // column whose subdiagonal entry it annihilated
  T c{};
  T s{};
};

// A = Q R for an almost-banded A, computed with adjacent-row Givens
// rotations applied column by column (left to right) and, within a column,
// from the bottom of the band upwards.
//
// Row i of R is stored as explicit entries for columns [i, hi_i) plus N
// coefficients alpha_i such that R(i, j) = sum_r alpha_i[r] * top(r, j) for
// j >= hi_i, where top is the dense block of A. The fill caused by the dense
// rows therefore costs O(N) per row.
template <class T>
class QrFactorization {
 public:
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t num_dense_rows() const { return dense_rows_; }

  // R(i, j), materialising fill on demand. Zero below the diagonal.
  T r_entry(std::size_t i, std::size_t j) const;
  const T& diagonal(std::size_t i) const { return rows_[i].vals.front(); }
  // One past the last explicitly stored column of row i.
  std::size_t row_hi(std::size_t i) const { return i + rows_[i].vals.size(); }

  const std::vector<GivensRotation<T>>& rotations() const { return rotations_; }
  // Rotations that annihilated entries of column j are
  // rotations()[col_offsets()[j] .. col_offsets()[j+1]).
  const std::vector<std::size_t>& col_offsets() const { return col_offsets_; }

  template <class U>
  friend QrFactorization<U> qr_factor(const AlmostBandedMatrix<U>& a);
  template <class U>
  friend std::vector<U> back_substitute(const QrFactorization<U>& qr, std::span<const U> s);
  template <class U>
  friend std::vector<U> solve_r_transpose(const QrFactorization<U>& qr, std::span<const U> y);

 private:
  struct Row {
    std::vector<T> vals;   // columns [i, i + vals.size())
    std::vector<T> alpha;  // size N
  };

  T fill(const Row& row, std::size_t j) const;

  std::size_t n_ = 0, m_ = 0, dense_rows_ = 0;
  std::vector<T> top_;  // N x n, row-major
  std::vector<Row> rows_;
  std::vector<GivensRotation<T>> rotations_;
  std::vector<std::size_t> col_offsets_;
};

// Throws SingularMatrixError with the column index on an exactly zero pivot.
template <class T>
QrFactorization<T> qr_factor(const AlmostBandedMatrix<T>& a);

// s = Q^T f, rotations applied in factorization order.
template <class T>
std::vector<T> apply_qt(const QrFactorization<T>& qr, std::span<const T> f);

// Q^T e_p, skipping rotations that cannot touch index p.
template <class T>
std::vector<T> apply_qt_unit(const QrFactorization<T>& qr, std::size_t p);

// Solves R u = s. Throws SingularMatrixError on an exactly zero diagonal.
template <class T>
std::vector<T> back_substitute(const QrFactorization<T>& qr, std::span<const T> s);

// Solves R^T z = y.
template <class T>
std::vector<T> solve_r_transpose(const QrFactorization<T>& qr, std::span<const T> y);

template <class T>
std::vector<T> solve(const QrFactorization<T>& qr, std::span<const T> f);

template <class T>
std::vector<T> solve(const AlmostBandedMatrix<T>& a, std::span<const T> f);

// Dense Q (row-major, n x n). Throws DenseCutoff above kDenseCutoff.
template <class T>
std::vector<T> accumulate_q(const QrFactorization<T>& qr);

// ||Q(j, n-m : n)||_2 for 0-based row j of a row-major n x n Q.
template <class T>
T q_tail_norm(std::span<const T> q, std::size_t n, std::size_t j, std::size_t m);

}  // namespace usm
