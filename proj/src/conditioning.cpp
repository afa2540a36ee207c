#include "usm/conditioning.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "usm/error.hpp"
#include "usm/series.hpp"

namespace usm {

namespace {

constexpr double kPowerTolerance = 1e-8;
constexpr int kPowerMaxIterations = 10000;

template <class T>
T infinity() {
  return T(std::numeric_limits<double>::infinity());
}

void check_cutoff(std::size_t n, const char* what) {
  if (n > kDenseCutoff) {
    fail(ErrorCode::DenseCutoff, std::string(what) + ": n = " + std::to_string(n) +
                                     " exceeds the dense cutoff " + std::to_string(kDenseCutoff));
  }
}

// For each weight vector w (length <= n), returns |A^{-1}(:, 0:len(w))| w.
// Each column of A^{-1} is formed once.
template <class T>
std::vector<std::vector<T>> abs_inverse_apply(const QrFactorization<T>& qr,
                                              const std::vector<std::vector<T>>& weights) {
  using std::abs;
  const std::size_t n = qr.n();
  std::size_t cols = 0;
  for (const auto& w : weights) cols = std::max(cols, std::min(w.size(), n));
  std::vector<std::vector<T>> out(weights.size(), std::vector<T>(n, T(0)));
  for (std::size_t p = 0; p < cols; ++p) {
    const std::vector<T> col = inverse_column(qr, p);
    for (std::size_t w = 0; w < weights.size(); ++w) {
      if (p >= weights[w].size() || weights[w][p] == T(0)) continue;
      const T& wt = weights[w][p];
      auto& acc = out[w];
      for (std::size_t i = 0; i < n; ++i) acc[i] += abs(col[i]) * wt;
    }
  }
  return out;
}

template <class T>
std::vector<T> row_sums(const AlmostBandedMatrix<T>& e) {
  std::vector<T> s(e.n(), T(0));
  for (std::size_t i = 0; i < e.n(); ++i) {
    for (std::size_t j = e.row_begin(i); j < e.row_end(i); ++j) s[i] += e.entry(i, j);
  }
  return s;
}

// Weights b(0:k) + E(0:k+m, 0:k) |u(0:k)| for the cond_Eb numerator.
template <class T>
std::vector<T> effective_weights(const AlmostBandedMatrix<T>& e, std::span<const T> u,
                                 std::span<const T> b, std::size_t k, std::size_t m) {
  using std::abs;
  const std::size_t n = e.n();
  if (u.size() != n || b.size() != n) {
    fail(ErrorCode::DimensionMismatch, "conditioning: u and b must have length n");
  }
  k = std::min(k, n);
  const std::size_t len = std::min(n, k + m);
  std::vector<T> v(len, T(0));
  for (std::size_t j = 0; j < len; ++j) {
    T acc = j < k ? T(b[j]) : T(0);
    const std::size_t hi = std::min(k, e.row_end(j));
    for (std::size_t l = e.row_begin(j); l < hi; ++l) acc += e.entry(j, l) * abs(u[l]);
    v[j] = std::move(acc);
  }
  return v;
}

template <class T>
void check_nonnegative(const AlmostBandedMatrix<T>& e, std::span<const T> b) {
  for (std::size_t i = 0; i < e.n(); ++i) {
    for (std::size_t j = e.row_begin(i); j < e.row_end(i); ++j) {
      if (e.entry(i, j) < T(0)) fail(ErrorCode::InvalidArgument, "E must be nonnegative");
    }
  }
  for (const auto& v : b) {
    if (v < T(0)) fail(ErrorCode::InvalidArgument, "b must be nonnegative");
  }
}

template <class T>
T power_iteration(std::size_t n, const std::function<std::vector<T>(std::span<const T>)>& op) {
  using std::abs;
  using std::sqrt;
  std::vector<T> x(n, T(1) / sqrt(T(static_cast<long>(n))));
  T lambda(0);
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    std::vector<T> y = op(std::span<const T>(x));
    const T norm = norm2(std::span<const T>(y));
    if (norm == T(0)) return T(0);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (abs(norm - lambda) <= T(kPowerTolerance) * norm) return norm;
    lambda = norm;
  }
  return lambda;
}

template <class T>
T kappa_2_from(const AlmostBandedMatrix<T>& a, const QrFactorization<T>& qr) {
  using std::sqrt;
  const std::size_t n = a.n();
  const T big = power_iteration<T>(n, [&](std::span<const T> x) {
    const std::vector<T> ax = a.apply(x);
    return a.apply_transpose(std::span<const T>(ax));
  });
  // (A^T A)^{-1} = R^{-1} R^{-T}
  const T inv = power_iteration<T>(n, [&](std::span<const T> x) {
    const std::vector<T> z = solve_r_transpose(qr, x);
    return back_substitute(qr, std::span<const T>(z));
  });
  return sqrt(big * inv);
}

}  // namespace

template <class T>
std::vector<T> inverse_column(const QrFactorization<T>& qr, std::size_t p) {
  const std::vector<T> s = apply_qt_unit(qr, p);
  return back_substitute(qr, std::span<const T>(s));
}

template <class T>
T kappa_inf(const AlmostBandedMatrix<T>& a) {
  check_cutoff(a.n(), "kappa_inf");
  try {
    const auto qr = qr_factor(a);
    const auto rows = abs_inverse_apply(qr, {std::vector<T>(a.n(), T(1))});
    return a.norm_inf() * norm_inf(std::span<const T>(rows[0]));
  } catch (const SingularMatrixError&) {
    return infinity<T>();
  }
}

template <class T>
T kappa_2(const AlmostBandedMatrix<T>& a) {
  check_cutoff(a.n(), "kappa_2");
  try {
    return kappa_2_from(a, qr_factor(a));
  } catch (const SingularMatrixError&) {
    return infinity<T>();
  }
}

template <class T>
T cond_componentwise(const AlmostBandedMatrix<T>& a, std::span<const T> u,
                     const AlmostBandedMatrix<T>& e, std::span<const T> b, std::size_t k,
                     std::size_t m) {
  check_cutoff(a.n(), "cond_componentwise");
  check_nonnegative(e, b);
  const T unorm = norm_inf(u);
  if (unorm == T(0)) fail(ErrorCode::InvalidArgument, "cond_componentwise: ||u||_inf = 0");
  const auto qr = qr_factor(a);
  const auto w = abs_inverse_apply(qr, {effective_weights(e, u, b, k, m)});
  return norm_inf(std::span<const T>(w[0])) / unorm;
}

template <class T>
T abs_inverse_times_norm(const AlmostBandedMatrix<T>& a, const AlmostBandedMatrix<T>& e) {
  check_cutoff(a.n(), "abs_inverse_times_norm");
  const auto qr = qr_factor(a);
  const auto w = abs_inverse_apply(qr, {row_sums(e)});
  return norm_inf(std::span<const T>(w[0]));
}

template <class T>
T forward_error_bound(const AlmostBandedMatrix<T>& a, const AlmostBandedMatrix<T>& e,
                      std::span<const T> b, std::span<const T> u, std::size_t k, std::size_t m,
                      const T& eps) {
  check_cutoff(a.n(), "forward_error_bound");
  check_nonnegative(e, b);
  if (eps == T(0)) return T(0);
  const auto qr = qr_factor(a);
  const auto w = abs_inverse_apply(qr, {effective_weights(e, u, b, k, m), row_sums(e)});
  const T be = norm_inf(std::span<const T>(w[1]));
  if (!(eps * be < T(1))) {
    fail(ErrorCode::BoundInapplicable,
         "bound inapplicable: eps * || |A^-1| E || = " + std::to_string(ScalarTraits<T>::to_double(eps * be)) +
             " >= 1");
  }
  return eps / (T(1) - eps * be) * norm_inf(std::span<const T>(w[0]));
}

template <class T>
ConditioningReport<T> conditioning_report(const AlmostBandedMatrix<T>& a, std::span<const T> f,
                                          std::span<const T> u, std::size_t k, std::size_t m) {
  using std::abs;
  check_cutoff(a.n(), "conditioning_report");
  const AlmostBandedMatrix<T> e = a.abs();
  std::vector<T> b(f.begin(), f.end());
  for (auto& v : b) v = abs(v);
  const T unorm = norm_inf(u);
  if (unorm == T(0)) fail(ErrorCode::InvalidArgument, "conditioning_report: ||u||_inf = 0");

  ConditioningReport<T> rep;
  rep.k = k;
  rep.m = m;
  const auto qr = qr_factor(a);
  const auto w = abs_inverse_apply(
      qr, {std::vector<T>(a.n(), T(1)), effective_weights(e, u, std::span<const T>(b), k, m)});
  rep.kappa_inf = a.norm_inf() * norm_inf(std::span<const T>(w[0]));
  rep.cond_Eb = norm_inf(std::span<const T>(w[1])) / unorm;
  rep.rule_of_thumb = rep.cond_Eb * ScalarTraits<T>::epsilon();
  rep.kappa_2 = kappa_2_from(a, qr);
  return rep;
}

#define USM_INSTANTIATE(T)                                                                   \
  template std::vector<T> inverse_column<T>(const QrFactorization<T>&, std::size_t);         \
  template T kappa_inf<T>(const AlmostBandedMatrix<T>&);                                     \
  template T kappa_2<T>(const AlmostBandedMatrix<T>&);                                       \
  template T cond_componentwise<T>(const AlmostBandedMatrix<T>&, std::span<const T>,         \
                                   const AlmostBandedMatrix<T>&, std::span<const T>,         \
                                   std::size_t, std::size_t);                                \
  template T forward_error_bound<T>(const AlmostBandedMatrix<T>&, const AlmostBandedMatrix<T>&, \
                                    std::span<const T>, std::span<const T>, std::size_t,     \
                                    std::size_t, const T&);                                  \
  template T abs_inverse_times_norm<T>(const AlmostBandedMatrix<T>&,                         \
                                       const AlmostBandedMatrix<T>&);                        \
  template ConditioningReport<T> conditioning_report<T>(const AlmostBandedMatrix<T>&,        \
                                                        std::span<const T>, std::span<const T>, \
                                                        std::size_t, std::size_t);

USM_INSTANTIATE(double)
USM_INSTANTIATE(BigFloat)

#undef USM_INSTANTIATE

}  // namespace usm
