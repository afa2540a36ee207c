#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usm/operators.hpp"
#include "usm/scalar.hpp"
#include "usm/series.hpp"

namespace usm {

// a^N(x) u^(N) + ... + a^0(x) u = g(x) on [-1, 1] with N boundary
// functionals. coeffs[l] holds the Chebyshev coefficients of a^l.
template <class T>
struct OdeProblem {
  int order = 0;
  std::vector<std::vector<T>> coeffs;
  std::vector<BoundaryFunctional<T>> bcs;
  std::vector<T> rhs;
};

// n x n matrix made of `num_dense_rows` dense rows on top of a banded block.
// Row i < N is dense_top(i, :); row i >= N is row i - N of the banded block.
template <class T>
class AlmostBandedMatrix {
 public:
  AlmostBandedMatrix() = default;
  AlmostBandedMatrix(std::size_t n, std::size_t num_dense_rows, std::vector<T> dense_top,
                     BandedMatrix<T> banded);

  // Builds from a row-major dense matrix; entries outside the declared
  // structure must be zero (checked).
  static AlmostBandedMatrix from_dense(std::size_t n, std::span<const T> dense,
                                       std::size_t num_dense_rows, std::size_t lower,
                                       std::size_t upper);

  std::size_t n() const { return n_; }
  std::size_t num_dense_rows() const { return dense_rows_; }
  // Lower/upper bandwidth of the banded block relative to its own rows.
  std::size_t lower_bw() const { return banded_.lower(); }
  std::size_t upper_bw() const { return banded_.upper(); }
  // entry(i, j) == 0 whenever i - j > hessenberg().
  std::size_t hessenberg() const { return dense_rows_ + banded_.lower(); }

  const T& dense(std::size_t r, std::size_t j) const { return top_[r * n_ + j]; }
  std::span<const T> dense_row(std::size_t r) const {
    return std::span<const T>(top_).subspan(r * n_, n_);
  }
  const BandedMatrix<T>& banded() const { return banded_; }

  T entry(std::size_t i, std::size_t j) const;

  // First/one-past-last structurally nonzero column of row i.
  std::size_t row_begin(std::size_t i) const;
  std::size_t row_end(std::size_t i) const;

  std::vector<T> apply(std::span<const T> x) const;
  std::vector<T> apply_transpose(std::span<const T> x) const;
  AlmostBandedMatrix abs() const;
  // max_i sum_j |a_ij|
  T norm_inf() const;
  // Row-major copy.
  std::vector<T> to_dense() const;

  template <class U, class Convert>
  AlmostBandedMatrix<U> convert(Convert&& fn) const {
    std::vector<U> top;
    top.reserve(top_.size());
    for (const auto& v : top_) top.push_back(fn(v));
    BandedMatrix<U> band(banded_.rows(), banded_.cols(), banded_.lower(), banded_.upper());
    for (std::size_t i = 0; i < banded_.rows(); ++i) {
      for (std::size_t j = banded_.row_begin(i); j < banded_.row_end(i); ++j) {
        band.at(i, j) = fn(banded_.at(i, j));
      }
    }
    return AlmostBandedMatrix<U>(n_, dense_rows_, std::move(top), std::move(band));
  }

 private:
  std::size_t n_ = 0;
  std::size_t dense_rows_ = 0;
  std::vector<T> top_;
  BandedMatrix<T> banded_;
};

template <class T>
struct AssembledSystem {
  AlmostBandedMatrix<T> A;
  std::vector<T> f;
  std::size_t m = 0;
  // Effective support; equals nnz_f until a solution is available.
  std::size_t k = 0;
  std::size_t nnz_f = 0;
};

// Rows x cols truncation of the differential operator L (no boundary rows).
template <class T>
BandedMatrix<T> assemble_operator(const OdeProblem<T>& p, std::size_t rows, std::size_t cols);

// Boundary-bordered n x n system.
template <class T>
AssembledSystem<T> assemble(const OdeProblem<T>& p, std::size_t n);

// S_{N-1} ... S_0 g: right-hand side in the C^(N) basis, independent of n.
template <class T>
std::vector<T> converted_rhs(const OdeProblem<T>& p);

// N + max_l deg(a^l).
template <class T>
std::size_t hessenberg_index(const OdeProblem<T>& p);

// max(last nonzero of f, chop(u_hat, tol)).
template <class T>
std::size_t effective_support(std::span<const T> f, std::span<const T> u_hat, const T& tol);

// Validates structure; throws InvalidArgument.
template <class T>
void validate(const OdeProblem<T>& p);

}  // namespace usm
