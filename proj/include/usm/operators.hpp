#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usm/scalar.hpp"
#include "usm/series.hpp"

namespace usm {

// Rectangular banded matrix. Row i stores columns [i - lower, i + upper];
// slots that fall outside the logical matrix are kept at exactly zero.
template <class T>
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t rows, std::size_t cols, std::size_t lower, std::size_t upper);

  static BandedMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t lower() const { return lower_; }
  std::size_t upper() const { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return i < rows_ && j < cols_ && j + lower_ >= i && j <= i + upper_;
  }
  // Zero outside the band.
  T entry(std::size_t i, std::size_t j) const;
  // Requires in_band(i, j).
  T& at(std::size_t i, std::size_t j);
  const T& at(std::size_t i, std::size_t j) const;

  // First/one-past-last column of row i that lies in the band.
  std::size_t row_begin(std::size_t i) const { return i > lower_ ? i - lower_ : 0; }
  std::size_t row_end(std::size_t i) const {
    return std::min(cols_, i + upper_ + 1);
  }

  // Leading rows x cols block.
  BandedMatrix cropped(std::size_t rows, std::size_t cols) const;

  std::vector<T> apply(std::span<const T> x) const;

 private:
  std::size_t rows_ = 0, cols_ = 0, lower_ = 0, upper_ = 0;
  std::vector<T> data_;
};

// d^lambda/dx^lambda: Chebyshev T coefficients -> C^(lambda) coefficients.
template <class T>
BandedMatrix<T> diff_op(int lambda, std::size_t rows, std::size_t cols);

// C^(lambda) -> C^(lambda+1) coefficients.
template <class T>
BandedMatrix<T> conv_op(int lambda, std::size_t rows, std::size_t cols);

// Multiplication by x in the C^(lambda) basis (tridiagonal).
template <class T>
BandedMatrix<T> jacobi_op(int lambda, std::size_t n);

// Multiplication by a(x) = sum_j a_j T_j(x) acting on C^(lambda)
// coefficients, built from the Chebyshev recurrence in the operator argument.
template <class T>
BandedMatrix<T> mult_op(std::span<const T> a, int lambda, std::size_t n);

template <class T>
BandedMatrix<T> band_mul(const BandedMatrix<T>& a, const BandedMatrix<T>& b);

template <class T>
BandedMatrix<T> band_add(const BandedMatrix<T>& a, const BandedMatrix<T>& b);

template <class T>
BandedMatrix<T> band_scale(const BandedMatrix<T>& a, const T& c);

}  // namespace usm
