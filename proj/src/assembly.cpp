#include "usm/assembly.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "usm/error.hpp"

namespace usm {

namespace {

// Degree of a Chebyshev series, or -1 for the zero series.
template <class T>
long degree_of(const std::vector<T>& c) {
  return static_cast<long>(nonzero_length(std::span<const T>(c))) - 1;
}

struct Bandwidths {
  std::size_t lower = 0;
  std::size_t upper = 0;
};

template <class T>
Bandwidths operator_bandwidths(const OdeProblem<T>& p) {
  Bandwidths bw;
  const long order = p.order;
  for (long l = 0; l <= order; ++l) {
    const long d = degree_of(p.coeffs[l]);
    if (d < 0) continue;
    bw.lower = std::max<std::size_t>(bw.lower, d);
    bw.upper = std::max<std::size_t>(bw.upper, d + l + 2 * (order - l));
  }
  return bw;
}

}  // namespace

template <class T>
AlmostBandedMatrix<T>::AlmostBandedMatrix(std::size_t n, std::size_t num_dense_rows,
                                          std::vector<T> dense_top, BandedMatrix<T> banded)
    : n_(n), dense_rows_(num_dense_rows), top_(std::move(dense_top)), banded_(std::move(banded)) {
  if (num_dense_rows > n || top_.size() != num_dense_rows * n ||
      banded_.rows() != n - num_dense_rows || banded_.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "almost-banded matrix: inconsistent block shapes");
  }
}

template <class T>
AlmostBandedMatrix<T> AlmostBandedMatrix<T>::from_dense(std::size_t n, std::span<const T> dense,
                                                        std::size_t num_dense_rows,
                                                        std::size_t lower, std::size_t upper) {
  if (dense.size() != n * n) fail(ErrorCode::DimensionMismatch, "from_dense: expected n*n entries");
  std::vector<T> top(dense.begin(), dense.begin() + num_dense_rows * n);
  BandedMatrix<T> band(n - num_dense_rows, n, lower, upper);
  for (std::size_t r = 0; r < band.rows(); ++r) {
    const std::size_t i = r + num_dense_rows;
    for (std::size_t j = 0; j < n; ++j) {
      const T& v = dense[i * n + j];
      if (band.in_band(r, j)) {
        band.at(r, j) = v;
      } else if (!(v == T(0))) {
        fail(ErrorCode::InvalidArgument, "from_dense: nonzero outside the declared band");
      }
    }
  }
  return AlmostBandedMatrix(n, num_dense_rows, std::move(top), std::move(band));
}

template <class T>
T AlmostBandedMatrix<T>::entry(std::size_t i, std::size_t j) const {
  if (i < dense_rows_) return top_[i * n_ + j];
  return banded_.entry(i - dense_rows_, j);
}

template <class T>
std::size_t AlmostBandedMatrix<T>::row_begin(std::size_t i) const {
  return i < dense_rows_ ? 0 : banded_.row_begin(i - dense_rows_);
}

template <class T>
std::size_t AlmostBandedMatrix<T>::row_end(std::size_t i) const {
  return i < dense_rows_ ? n_ : banded_.row_end(i - dense_rows_);
}

template <class T>
std::vector<T> AlmostBandedMatrix<T>::apply(std::span<const T> x) const {
  if (x.size() != n_) fail(ErrorCode::DimensionMismatch, "apply: size mismatch");
  std::vector<T> y(n_, T(0));
  for (std::size_t i = 0; i < n_; ++i) {
    T acc(0);
    if (i < dense_rows_) {
      for (std::size_t j = 0; j < n_; ++j) acc += top_[i * n_ + j] * x[j];
    } else {
      const std::size_t r = i - dense_rows_;
      for (std::size_t j = banded_.row_begin(r); j < banded_.row_end(r); ++j) {
        acc += banded_.at(r, j) * x[j];
      }
    }
    y[i] = std::move(acc);
  }
  return y;
}

template <class T>
std::vector<T> AlmostBandedMatrix<T>::apply_transpose(std::span<const T> x) const {
  if (x.size() != n_) fail(ErrorCode::DimensionMismatch, "apply_transpose: size mismatch");
  std::vector<T> y(n_, T(0));
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < dense_rows_) {
      for (std::size_t j = 0; j < n_; ++j) y[j] += top_[i * n_ + j] * x[i];
    } else {
      const std::size_t r = i - dense_rows_;
      for (std::size_t j = banded_.row_begin(r); j < banded_.row_end(r); ++j) {
        y[j] += banded_.at(r, j) * x[i];
      }
    }
  }
  return y;
}

template <class T>
AlmostBandedMatrix<T> AlmostBandedMatrix<T>::abs() const {
  return convert<T>([](const T& v) {
    using std::abs;
    return T(abs(v));
  });
}

template <class T>
T AlmostBandedMatrix<T>::norm_inf() const {
  using std::abs;
  T peak(0);
  for (std::size_t i = 0; i < n_; ++i) {
    T sum(0);
    for (std::size_t j = row_begin(i); j < row_end(i); ++j) sum += abs(entry(i, j));
    if (sum > peak) peak = sum;
  }
  return peak;
}

template <class T>
std::vector<T> AlmostBandedMatrix<T>::to_dense() const {
  std::vector<T> d(n_ * n_, T(0));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = row_begin(i); j < row_end(i); ++j) d[i * n_ + j] = entry(i, j);
  }
  return d;
}

template <class T>
void validate(const OdeProblem<T>& p) {
  using std::abs;
  if (p.order < 1) fail(ErrorCode::InvalidArgument, "ODE order must be positive");
  const auto order = static_cast<std::size_t>(p.order);
  if (p.coeffs.size() != order + 1) {
    fail(ErrorCode::InvalidArgument, "expected " + std::to_string(order + 1) +
                                         " coefficient functions, got " +
                                         std::to_string(p.coeffs.size()));
  }
  if (p.bcs.size() != order) {
    fail(ErrorCode::InvalidArgument, "expected " + std::to_string(order) +
                                         " boundary conditions, got " +
                                         std::to_string(p.bcs.size()));
  }
  for (const auto& bc : p.bcs) {
    if (bc.point != 1 && bc.point != -1) {
      fail(ErrorCode::InvalidArgument, "boundary point must be -1 or +1");
    }
    if (bc.derivative_order < 0 || bc.derivative_order >= p.order) {
      fail(ErrorCode::InvalidArgument, "boundary derivative order must lie in [0, N)");
    }
  }
  T all_peak(0), lead_peak(0);
  for (std::size_t l = 0; l <= order; ++l) {
    for (const auto& c : p.coeffs[l]) {
      if (abs(c) > all_peak) all_peak = abs(c);
      if (l == order && abs(c) > lead_peak) lead_peak = abs(c);
    }
  }
  if (lead_peak == T(0)) {
    fail(ErrorCode::InvalidArgument, "leading coefficient a^N is identically zero");
  }
  if (lead_peak < ScalarTraits<T>::epsilon() * all_peak) {
    fail(ErrorCode::InvalidArgument, "leading coefficient a^N is negligible relative to the others");
  }
}

template <class T>
BandedMatrix<T> assemble_operator(const OdeProblem<T>& p, std::size_t rows, std::size_t cols) {
  validate(p);
  const Bandwidths bw = operator_bandwidths(p);
  // Square working size with enough slack that every kept entry is exact.
  const std::size_t size = std::max(rows, cols) + bw.lower + bw.upper + 2;
  const int order = p.order;

  BandedMatrix<T> total(size, size, 0, 0);
  for (int l = order; l >= 0; --l) {
    const auto& a = p.coeffs[l];
    if (degree_of(a) < 0) continue;
    BandedMatrix<T> term = mult_op<T>(std::span<const T>(a), l, size);
    if (l >= 1) term = band_mul(term, diff_op<T>(l, size, size));
    for (int c = l; c < order; ++c) term = band_mul(conv_op<T>(c, size, size), term);
    total = band_add(total, term);
  }
  return total.cropped(rows, cols);
}

template <class T>
std::vector<T> converted_rhs(const OdeProblem<T>& p) {
  std::vector<T> r = p.rhs;
  r.resize(nonzero_length(std::span<const T>(r)));
  for (int c = 0; c < p.order; ++c) {
    r = conv_op<T>(c, r.size(), r.size()).apply(r);
  }
  return r;
}

template <class T>
AssembledSystem<T> assemble(const OdeProblem<T>& p, std::size_t n) {
  validate(p);
  const auto order = static_cast<std::size_t>(p.order);
  const std::size_t m = hessenberg_index(p);
  if (n <= m || n <= order) {
    fail(ErrorCode::InvalidArgument, "n = " + std::to_string(n) +
                                         " is too small for this operator (needs n > " +
                                         std::to_string(std::max(m, order)) + ")");
  }
  BandedMatrix<T> band = assemble_operator(p, n - order, n);
  std::vector<T> top;
  top.reserve(order * n);
  for (const auto& bc : p.bcs) {
    auto row = boundary_row(bc, n);
    std::move(row.begin(), row.end(), std::back_inserter(top));
  }

  std::vector<T> f(n, T(0));
  for (std::size_t i = 0; i < order; ++i) f[i] = p.bcs[i].target;
  const std::vector<T> r = converted_rhs(p);
  for (std::size_t k = 0; k < r.size() && order + k < n; ++k) f[order + k] = r[k];

  AssembledSystem<T> sys;
  sys.A = AlmostBandedMatrix<T>(n, order, std::move(top), std::move(band));
  sys.f = std::move(f);
  sys.m = m;
  sys.nnz_f = nonzero_length(std::span<const T>(sys.f));
  sys.k = sys.nnz_f;
  return sys;
}

template <class T>
std::size_t hessenberg_index(const OdeProblem<T>& p) {
  long deg = 0;
  for (const auto& a : p.coeffs) deg = std::max(deg, degree_of(a));
  return static_cast<std::size_t>(p.order) + static_cast<std::size_t>(deg);
}

template <class T>
std::size_t effective_support(std::span<const T> f, std::span<const T> u_hat, const T& tol) {
  return std::max(nonzero_length(f), chop(u_hat, tol));
}

#define USM_INSTANTIATE(T)                                                                  \
  template class AlmostBandedMatrix<T>;                                                     \
  template BandedMatrix<T> assemble_operator<T>(const OdeProblem<T>&, std::size_t,          \
                                                std::size_t);                               \
  template AssembledSystem<T> assemble<T>(const OdeProblem<T>&, std::size_t);               \
  template std::vector<T> converted_rhs<T>(const OdeProblem<T>&);                           \
  template std::size_t hessenberg_index<T>(const OdeProblem<T>&);                           \
  template std::size_t effective_support<T>(std::span<const T>, std::span<const T>,         \
                                            const T&);                                      \
  template void validate<T>(const OdeProblem<T>&);

USM_INSTANTIATE(double)
USM_INSTANTIATE(BigFloat)

#undef USM_INSTANTIATE

}  // namespace usm
