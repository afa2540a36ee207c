#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "usm/problem.hpp"
#include "usm/scalar.hpp"

namespace testing {

struct NamedProblem {
  std::string name;
  usm::ProblemSpec spec;
};

inline const char* kXSquared =
    "# u'' = 2, u(-1) = u(1) = 1; u = x^2 = (T0 + T2)/2\n"
    "order = 2\n"
    "coeff.2 = [1]\n"
    "bc.0 = (-1, 0, 1)\n"
    "bc.1 = (1, 0, 1)\n"
    "rhs = [2]\n"
    "reference = [0.5, 0, 0.5]\n";

inline const char* kLinear =
    "# u'' = 0, u(-1) = 0, u(1) = 1\n"
    "order = 2\n"
    "coeff.2 = [1]\n"
    "bc.0 = (-1, 0, 0)\n"
    "bc.1 = (1, 0, 1)\n"
    "rhs = [0]\n"
    "reference = [0.5, 0.5]\n";

inline std::vector<NamedProblem> corpus() {
  std::vector<NamedProblem> out;
  out.push_back({"airy_1e-2", usm::airy_problem("1e-2")});
  out.push_back({"x_squared", usm::parse_problem_string(kXSquared)});
  out.push_back({"linear", usm::parse_problem_string(kLinear)});
  out.push_back({"helmholtz", usm::parse_problem_string(
      "order = 2\ncoeff.0 = [1]\ncoeff.2 = [1]\nbc.0 = (-1, 0, 0)\nbc.1 = (1, 0, 0)\nrhs = [1]\n")});
  out.push_back({"first_order", usm::parse_problem_string(
      "order = 1\ncoeff.0 = [1]\ncoeff.1 = [1]\nbc.0 = (-1, 0, 1)\nrhs = [0, 1]\n")});
  out.push_back({"third_order", usm::parse_problem_string(
      "order = 3\ncoeff.0 = [0, 1]\ncoeff.3 = [1]\n"
      "bc.0 = (-1, 0, 0)\nbc.1 = (1, 0, 0)\nbc.2 = (1, 1, 0)\nrhs = [1]\n")});
  out.push_back({"neumann", usm::parse_problem_string(
      "order = 2\ncoeff.0 = [-1]\ncoeff.2 = [1]\nbc.0 = (-1, 1, 0)\nbc.1 = (1, 0, 1)\n"
      "rhs = [0.5, 0, 0.5]\n")});
  out.push_back({"variable", usm::parse_problem_string(
      "order = 2\ncoeff.0 = [-1]\ncoeff.1 = [0.5, 0, 0.5]\ncoeff.2 = [2, 1]\n"
      "bc.0 = (-1, 0, 1)\nbc.1 = (1, 0, -1)\nrhs = [0, 0, 0, 1]\n")});
  return out;
}

using LD = long double;

// T_k(x) = cos(k arccos x)
inline LD cheb_t(int k, LD x) { return std::cos(static_cast<LD>(k) * std::acos(x)); }

// Explicit sum for C^(lam)_k, lam >= 1:
//   sum_j (-1)^j Gamma(k - j + lam) / (Gamma(lam) j! (k - 2j)!) (2x)^(k - 2j)
inline LD gegenbauer_explicit(int lam, int k, LD x) {
  LD sum = 0;
  for (int j = 0; 2 * j <= k; ++j) {
    const LD coef = std::exp(std::lgamma(static_cast<LD>(k - j + lam)) - std::lgamma(static_cast<LD>(lam)) -
                             std::lgamma(static_cast<LD>(j + 1)) -
                             std::lgamma(static_cast<LD>(k - 2 * j + 1)));
    sum += (j % 2 ? -coef : coef) * std::pow(2 * x, k - 2 * j);
  }
  return sum;
}

inline LD basis(int lam, int k, LD x) { return lam == 0 ? cheb_t(k, x) : gegenbauer_explicit(lam, k, x); }

// Chebyshev coefficients of the derivative, from c'_{k-1} = c'_{k+1} + 2k c_k.
inline std::vector<LD> cheb_derivative(const std::vector<LD>& c) {
  const int n = static_cast<int>(c.size());
  if (n <= 1) return {0};
  std::vector<LD> d(n + 1, 0);
  for (int k = n - 1; k >= 1; --k) d[k - 1] = d[k + 1] + 2 * k * c[k];
  d[0] /= 2;
  d.resize(n - 1);
  return d;
}

inline LD cheb_eval(const std::vector<LD>& c, LD x) {
  LD s = 0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * cheb_t(static_cast<int>(k), x);
  return s;
}

// Least-squares coefficients in C^(lam) of values at the points.
inline std::vector<LD> fit_basis(int lam, int degree, const std::vector<LD>& x, const std::vector<LD>& v) {
  using Mat = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  Mat V(x.size(), degree + 1);
  Vec b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int k = 0; k <= degree; ++k) V(i, k) = basis(lam, k, x[i]);
    b(i) = v[i];
  }
  Vec c = V.colPivHouseholderQr().solve(b);
  return std::vector<LD>(c.data(), c.data() + c.size());
}

inline std::vector<LD> chebyshev_points(int count) {
  std::vector<LD> x(count);
  const LD pi = std::acos(LD(-1));
  for (int i = 0; i < count; ++i) x[i] = std::cos(pi * (2 * i + 1) / (2 * count));
  return x;
}

// Coefficients of sum_l a^l(x) u^(l)(x) in C^(N), from values at 2(d+1)
// Chebyshev points fitted by least squares. a^l and u are Chebyshev series.
inline std::vector<LD> operator_oracle(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& u) {
  const int order = static_cast<int>(a.size()) - 1;
  int degree = static_cast<int>(u.size()) - 1;
  int max_a = 0;
  for (const auto& c : a) max_a = std::max(max_a, static_cast<int>(c.size()) - 1);
  degree += max_a;
  const auto x = chebyshev_points(2 * (degree + 1));
  std::vector<std::vector<LD>> derivs(order + 1);
  derivs[0].assign(u.begin(), u.end());
  for (int l = 1; l <= order; ++l) derivs[l] = cheb_derivative(derivs[l - 1]);
  std::vector<LD> values(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int l = 0; l <= order; ++l) {
      if (a[l].empty()) continue;
      const std::vector<LD> al(a[l].begin(), a[l].end());
      values[i] += cheb_eval(al, x[i]) * cheb_eval(derivs[l], x[i]);
    }
  }
  return fit_basis(order, degree, x, values);
}

}  // namespace testing
