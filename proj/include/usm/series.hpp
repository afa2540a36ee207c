#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usm/scalar.hpp"

namespace usm {

// Coefficients in the Gegenbauer basis C^(lambda); lambda = 0 means
// Chebyshev T.
template <class T>
struct UltrasphericalSeries {
  int lambda = 0;
  std::vector<T> coeffs;
};

// Boundary condition u^(d)(point) = target with point in {-1, +1}.
template <class T>
struct BoundaryFunctional {
  int point = 1;
  int derivative_order = 0;
  T target{};
};

// Sum_k coeffs[k] C^(lambda)_k(x) by backward recurrence.
template <class T>
T clenshaw_eval(const UltrasphericalSeries<T>& s, const T& x);

// Smallest k with max|coeffs[k..]| <= tol * max|coeffs|.
template <class T>
std::size_t chop(std::span<const T> coeffs, const T& tol);

// Entry k is T_k^(d)(point) for the functional's derivative order d.
template <class T>
std::vector<T> boundary_row(const BoundaryFunctional<T>& bc, std::size_t n);

// Euclidean norm with scaling, so tiny (subnormal) inputs do not flush
// to zero and large inputs do not overflow. Exactly zero iff all entries are.
template <class T>
T norm2(std::span<const T> v);

template <class T>
T norm_inf(std::span<const T> v);

// ||.||_w with w = 1/sqrt(1-x^2) on a Chebyshev series: the 2-norm of its
// coefficients. Throws InvalidArgument for lambda != 0.
template <class T>
T weighted_norm(const UltrasphericalSeries<T>& s);

// Index of the last nonzero entry plus one.
template <class T>
std::size_t nonzero_length(std::span<const T> v);

}  // namespace usm
