#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usm/assembly.hpp"
#include "usm/qr.hpp"

namespace usm {

template <class T>
struct ConditioningReport {
  T kappa_inf{};
  T kappa_2{};
  T cond_Eb{};
  // cond_Eb * machine epsilon
  T rule_of_thumb{};
  std::size_t k = 0;
  std::size_t m = 0;
};

// Column p of A^{-1}.
template <class T>
std::vector<T> inverse_column(const QrFactorization<T>& qr, std::size_t p);

// ||A||_inf ||A^{-1}||_inf, with A^{-1} formed one column at a time.
// Infinity for a singular A; DenseCutoff above kDenseCutoff.
template <class T>
T kappa_inf(const AlmostBandedMatrix<T>& a);

// sigma_max / sigma_min from power iteration on A^T A and (A^T A)^{-1}
// (relative tolerance 1e-8, at most 10000 iterations each).
template <class T>
T kappa_2(const AlmostBandedMatrix<T>& a);

// || |B_1| b_1 + |B~_1| E_11 |u_1| ||_inf / ||u||_inf with B = A^{-1},
// B_1 = B(:, 0:k), B~_1 = B(:, 0:k+m), E_11 = E(0:k+m, 0:k), u_1 = u(0:k).
// E must be nonnegative. InvalidArgument when ||u||_inf = 0.
template <class T>
T cond_componentwise(const AlmostBandedMatrix<T>& a, std::span<const T> u,
                     const AlmostBandedMatrix<T>& e, std::span<const T> b, std::size_t k,
                     std::size_t m);

// eps / (1 - eps || |B| E ||_inf) * || |B_1| b_1 + |B~_1| E_11 |u_1| ||_inf.
// BoundInapplicable when eps || |B| E ||_inf >= 1.
template <class T>
T forward_error_bound(const AlmostBandedMatrix<T>& a, const AlmostBandedMatrix<T>& e,
                      std::span<const T> b, std::span<const T> u, std::size_t k, std::size_t m,
                      const T& eps);

// || |A^{-1}| E ||_inf
template <class T>
T abs_inverse_times_norm(const AlmostBandedMatrix<T>& a, const AlmostBandedMatrix<T>& e);

// kappa_inf, kappa_2 and cond_Eb with E = |A|, b = |f| from one factorization.
template <class T>
ConditioningReport<T> conditioning_report(const AlmostBandedMatrix<T>& a, std::span<const T> f,
                                          std::span<const T> u, std::size_t k, std::size_t m);

}  // namespace usm
