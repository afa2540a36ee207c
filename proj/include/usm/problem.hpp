#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "usm/assembly.hpp"
#include "usm/scalar.hpp"

namespace usm {

// Problems are kept as decimal text and materialized at each precision, so
// the Extended reference sees the exact data rather than its binary64
// rounding.
//
// File format, one `key = value` per line, `#` starts a comment:
//
//   mu      = 1e-2
//   order   = 2
//   coeff.0 = [0, -1]            # a^0(x) = -x, Chebyshev coefficients
//   coeff.2 = [mu]               # tokens `mu` / `-mu` refer to the mu key
//   bc.0    = (-1, 0, airy(-(1/mu)^(1/3)))
//   bc.1    = (1, 0, airy((1/mu)^(1/3)))
//   rhs     = [0]
//   reference = solve            # or a list of exact solution coefficients
//
// Missing coeff.<l> for l < order default to zero; coeff.<order> is required.
// Boundary targets are decimals, airy(<decimal>) or airy(+-(1/mu)^(1/3)).

struct TargetSpec {
  enum class Kind { Literal, Airy };
  Kind kind = Kind::Literal;
  // Literal value, or the Airy argument when !scaled_by_mu.
  std::string text = "0";
  // airy(sign * (1/mu)^(1/3))
  bool scaled_by_mu = false;
  int sign = 1;
};

struct BoundarySpec {
  int point = 1;
  int derivative_order = 0;
  TargetSpec target;
};

enum class ReferenceKind { None, ExtendedSolve, Coefficients };

struct ProblemSpec {
  std::optional<std::string> mu;
  int order = 0;
  std::vector<std::vector<std::string>> coeffs;  // order + 1 token lists
  std::vector<BoundarySpec> bcs;
  std::vector<std::string> rhs;
  ReferenceKind reference = ReferenceKind::None;
  std::vector<std::string> reference_coeffs;
};

// Throws ParseError on malformed input.
ProblemSpec parse_problem_string(std::string_view text);
// Throws IoError if the file cannot be read, ParseError otherwise.
ProblemSpec parse_problem_file(const std::string& path);

// mu u'' - x u = 0, u(-1) = Ai(-(1/mu)^(1/3)), u(1) = Ai((1/mu)^(1/3)),
// solution Ai((1/mu)^(1/3) x).
ProblemSpec airy_problem(std::string_view mu);

// Decimal data rounded to T; BigFloat uses the thread's default precision.
// Airy boundary values are evaluated at higher precision and rounded once.
template <class T>
OdeProblem<T> materialize(const ProblemSpec& spec);

// The exact solution coefficients of a ReferenceKind::Coefficients problem.
template <class T>
std::vector<T> reference_coefficients(const ProblemSpec& spec);

}  // namespace usm
