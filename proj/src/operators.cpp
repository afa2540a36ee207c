#include "usm/operators.hpp"

#include <algorithm>
#include <string>

#include "usm/error.hpp"

namespace usm {

template <class T>
BandedMatrix<T>::BandedMatrix(std::size_t rows, std::size_t cols, std::size_t lower,
                              std::size_t upper)
    : rows_(rows), cols_(cols), lower_(lower), upper_(upper),
      data_(rows * (lower + upper + 1), T(0)) {}

template <class T>
BandedMatrix<T> BandedMatrix<T>::identity(std::size_t n) {
  BandedMatrix m(n, n, 0, 0);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = T(1);
  return m;
}

template <class T>
T BandedMatrix<T>::entry(std::size_t i, std::size_t j) const {
  if (!in_band(i, j)) return T(0);
  return at(i, j);
}

template <class T>
T& BandedMatrix<T>::at(std::size_t i, std::size_t j) {
  return data_[i * (lower_ + upper_ + 1) + (j + lower_ - i)];
}

template <class T>
const T& BandedMatrix<T>::at(std::size_t i, std::size_t j) const {
  return data_[i * (lower_ + upper_ + 1) + (j + lower_ - i)];
}

template <class T>
BandedMatrix<T> BandedMatrix<T>::cropped(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) {
    fail(ErrorCode::DimensionMismatch, "crop larger than the matrix");
  }
  BandedMatrix out(rows, cols, lower_, upper_);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = out.row_begin(i); j < out.row_end(i); ++j) out.at(i, j) = at(i, j);
  }
  return out;
}

template <class T>
std::vector<T> BandedMatrix<T>::apply(std::span<const T> x) const {
  if (x.size() != cols_) fail(ErrorCode::DimensionMismatch, "banded apply: size mismatch");
  std::vector<T> y(rows_, T(0));
  for (std::size_t i = 0; i < rows_; ++i) {
    T acc(0);
    for (std::size_t j = row_begin(i); j < row_end(i); ++j) acc += at(i, j) * x[j];
    y[i] = std::move(acc);
  }
  return y;
}

template <class T>
BandedMatrix<T> diff_op(int lambda, std::size_t rows, std::size_t cols) {
  if (lambda < 1) {
    fail(ErrorCode::InvalidArgument, "diff_op needs lambda >= 1; use the identity for lambda = 0");
  }
  const auto lam = static_cast<std::size_t>(lambda);
  BandedMatrix<T> d(rows, cols, 0, lam);
  // 2^(lambda-1) (lambda-1)!
  long scale = 1;
  for (long j = 1; j < lambda; ++j) scale *= 2 * j;
  for (std::size_t k = lam; k < cols; ++k) {
    if (k - lam < rows) d.at(k - lam, k) = T(scale) * T(static_cast<long>(k));
  }
  return d;
}

template <class T>
BandedMatrix<T> conv_op(int lambda, std::size_t rows, std::size_t cols) {
  if (lambda < 0) fail(ErrorCode::InvalidArgument, "conv_op needs lambda >= 0");
  BandedMatrix<T> s(rows, cols, 0, 2);
  const long lam = lambda;
  for (std::size_t k = 0; k < rows; ++k) {
    const long kk = static_cast<long>(k);
    if (k < cols) {
      if (lam == 0) {
        s.at(k, k) = k == 0 ? T(1) : T(1) / T(2);
      } else {
        s.at(k, k) = T(lam) / T(lam + kk);
      }
    }
    if (k + 2 < cols) {
      s.at(k, k + 2) = lam == 0 ? -T(1) / T(2) : -T(lam) / T(lam + kk + 2);
    }
  }
  return s;
}

template <class T>
BandedMatrix<T> jacobi_op(int lambda, std::size_t n) {
  if (lambda < 0) fail(ErrorCode::InvalidArgument, "jacobi_op needs lambda >= 0");
  BandedMatrix<T> j(n, n, 1, 1);
  const long lam = lambda;
  for (std::size_t k = 0; k < n; ++k) {
    const long kk = static_cast<long>(k);
    if (lam == 0) {
      if (k + 1 < n) j.at(k + 1, k) = k == 0 ? T(1) : T(1) / T(2);
      if (k >= 1) j.at(k - 1, k) = T(1) / T(2);
    } else {
      // x C_k = (k+1)/(2(k+lam)) C_{k+1} + (k+2lam-1)/(2(k+lam)) C_{k-1}
      if (k + 1 < n) j.at(k + 1, k) = T(kk + 1) / T(2 * (kk + lam));
      if (k >= 1) j.at(k - 1, k) = T(kk + 2 * lam - 1) / T(2 * (kk + lam));
    }
  }
  return j;
}

template <class T>
BandedMatrix<T> mult_op(std::span<const T> a, int lambda, std::size_t n) {
  std::size_t degree = a.size();
  while (degree > 0 && a[degree - 1] == T(0)) --degree;
  if (degree == 0) return BandedMatrix<T>(n, n, 0, 0);
  --degree;
  // Each recurrence step corrupts one more trailing row of the truncation;
  // build with that many slack rows and crop.
  const std::size_t size = n + degree + 1;
  const BandedMatrix<T> jac = jacobi_op<T>(lambda, size);
  BandedMatrix<T> prev = BandedMatrix<T>::identity(size);
  BandedMatrix<T> result = band_scale(prev, a[0]);
  if (degree >= 1) {
    BandedMatrix<T> cur = jac;
    result = band_add(result, band_scale(cur, a[1]));
    for (std::size_t j = 1; j < degree; ++j) {
      BandedMatrix<T> next = band_add(band_scale(band_mul(jac, cur), T(2)), band_scale(prev, T(-1)));
      prev = std::move(cur);
      cur = std::move(next);
      result = band_add(result, band_scale(cur, a[j + 1]));
    }
  }
  return result.cropped(n, n);
}

template <class T>
BandedMatrix<T> band_mul(const BandedMatrix<T>& a, const BandedMatrix<T>& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::DimensionMismatch,
         "band_mul: " + std::to_string(a.cols()) + " != " + std::to_string(b.rows()));
  }
  BandedMatrix<T> c(a.rows(), b.cols(), a.lower() + b.lower(), a.upper() + b.upper());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = c.row_begin(i); j < c.row_end(i); ++j) {
      // p ranges over the intersection of row i of a and column j of b
      const std::size_t p_lo = std::max(a.row_begin(i), j > b.upper() ? j - b.upper() : 0);
      const std::size_t p_hi = std::min(a.row_end(i), std::min(b.rows(), j + b.lower() + 1));
      T acc(0);
      for (std::size_t p = p_lo; p < p_hi; ++p) acc += a.at(i, p) * b.at(p, j);
      c.at(i, j) = std::move(acc);
    }
  }
  return c;
}

template <class T>
BandedMatrix<T> band_add(const BandedMatrix<T>& a, const BandedMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, "band_add: shape mismatch");
  }
  BandedMatrix<T> c(a.rows(), a.cols(), std::max(a.lower(), b.lower()),
                    std::max(a.upper(), b.upper()));
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = c.row_begin(i); j < c.row_end(i); ++j) {
      c.at(i, j) = a.entry(i, j) + b.entry(i, j);
    }
  }
  return c;
}

template <class T>
BandedMatrix<T> band_scale(const BandedMatrix<T>& a, const T& c) {
  BandedMatrix<T> out(a.rows(), a.cols(), a.lower(), a.upper());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = a.row_begin(i); j < a.row_end(i); ++j) out.at(i, j) = c * a.at(i, j);
  }
  return out;
}

#define USM_INSTANTIATE(T)                                                                 \
  template class BandedMatrix<T>;                                                          \
  template BandedMatrix<T> diff_op<T>(int, std::size_t, std::size_t);                      \
  template BandedMatrix<T> conv_op<T>(int, std::size_t, std::size_t);                      \
  template BandedMatrix<T> jacobi_op<T>(int, std::size_t);                                 \
  template BandedMatrix<T> mult_op<T>(std::span<const T>, int, std::size_t);               \
  template BandedMatrix<T> band_mul<T>(const BandedMatrix<T>&, const BandedMatrix<T>&);    \
  template BandedMatrix<T> band_add<T>(const BandedMatrix<T>&, const BandedMatrix<T>&);    \
  template BandedMatrix<T> band_scale<T>(const BandedMatrix<T>&, const T&);

USM_INSTANTIATE(double)
USM_INSTANTIATE(BigFloat)

#undef USM_INSTANTIATE

}  // namespace usm
