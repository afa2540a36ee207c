#include "usm/series.hpp"

#include <cmath>

#include "usm/error.hpp"

namespace usm {

template <class T>
T clenshaw_eval(const UltrasphericalSeries<T>& s, const T& x) {
  const auto& c = s.coeffs;
  if (c.empty()) return T(0);
  T b1(0), b2(0);
  if (s.lambda == 0) {
    for (std::size_t k = c.size(); k-- > 1;) {
      T b0 = c[k] + T(2) * x * b1 - b2;
      b2 = std::move(b1);
      b1 = std::move(b0);
    }
    return c[0] + x * b1 - b2;
  }
  // C_{k+1} = a_k C_k + b_k C_{k-1},
  // a_k = 2(k+lambda)x/(k+1), b_k = -(k+2lambda-1)/(k+1).
  const long lam = s.lambda;
  for (std::size_t k = c.size(); k-- > 0;) {
    const long kk = static_cast<long>(k);
    T alpha = T(2 * (kk + lam)) * x / T(kk + 1);
    T beta = -T(kk + 1 + 2 * lam - 1) / T(kk + 2);
    T b0 = c[k] + alpha * b1 + beta * b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return b1;
}

template <class T>
std::size_t chop(std::span<const T> coeffs, const T& tol) {
  using std::abs;
  if (!(tol > T(0))) fail(ErrorCode::InvalidArgument, "chop tolerance must be positive");
  T peak(0);
  for (const auto& c : coeffs) {
    if (abs(c) > peak) peak = abs(c);
  }
  const T threshold = tol * peak;
  std::size_t k = coeffs.size();
  while (k > 0 && abs(coeffs[k - 1]) <= threshold) --k;
  return k;
}

template <class T>
std::vector<T> boundary_row(const BoundaryFunctional<T>& bc, std::size_t n) {
  if (bc.point != 1 && bc.point != -1) {
    fail(ErrorCode::InvalidArgument, "boundary point must be -1 or +1");
  }
  if (bc.derivative_order < 0) {
    fail(ErrorCode::InvalidArgument, "negative derivative order");
  }
  const long d = bc.derivative_order;
  std::vector<T> row;
  row.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long kk = static_cast<long>(k);
    // T_k^(d)(1) = prod_{j<d} (k^2 - j^2) / (2j + 1)
    T value(1);
    for (long j = 0; j < d; ++j) {
      value = value * T(kk * kk - j * j) / T(2 * j + 1);
    }
    if (bc.point == -1 && ((kk + d) % 2 != 0)) value = -value;
    row.push_back(std::move(value));
  }
  return row;
}

template <class T>
T norm2(std::span<const T> v) {
  using std::abs;
  using std::sqrt;
  T scale(0);
  for (const auto& x : v) {
    if (abs(x) > scale) scale = abs(x);
  }
  if (scale == T(0)) return T(0);
  T sum(0);
  for (const auto& x : v) {
    T r = x / scale;
    sum += r * r;
  }
  return scale * sqrt(sum);
}

template <class T>
T norm_inf(std::span<const T> v) {
  using std::abs;
  T peak(0);
  for (const auto& x : v) {
    if (abs(x) > peak) peak = abs(x);
  }
  return peak;
}

template <class T>
T weighted_norm(const UltrasphericalSeries<T>& s) {
  if (s.lambda != 0) {
    fail(ErrorCode::InvalidArgument, "weighted norm is defined for Chebyshev series only");
  }
  return norm2(std::span<const T>(s.coeffs));
}

template <class T>
std::size_t nonzero_length(std::span<const T> v) {
  std::size_t k = v.size();
  while (k > 0 && v[k - 1] == T(0)) --k;
  return k;
}

#define USM_INSTANTIATE(T)                                                          \
  template T clenshaw_eval<T>(const UltrasphericalSeries<T>&, const T&);            \
  template std::size_t chop<T>(std::span<const T>, const T&);                       \
  template std::vector<T> boundary_row<T>(const BoundaryFunctional<T>&, std::size_t); \
  template T norm2<T>(std::span<const T>);                                          \
  template T norm_inf<T>(std::span<const T>);                                       \
  template T weighted_norm<T>(const UltrasphericalSeries<T>&);                      \
  template std::size_t nonzero_length<T>(std::span<const T>);

USM_INSTANTIATE(double)
USM_INSTANTIATE(BigFloat)

#undef USM_INSTANTIATE

}  // namespace usm
