#pragma once

#include <cstddef>

#include "usm/scalar.hpp"

namespace usm {

struct AiryEvaluation {
  BigFloat x;
  PrecisionLevel precision;
  // Rounded to precision.significand_bits().
  BigFloat value;
  std::size_t terms_used = 0;
};

// Largest |x| the Maclaurin evaluation is validated for.
inline constexpr double kAiryMaxAbsArgument = 64.0;

// Ai(x) from its Maclaurin series, summed at a working precision high enough
// to absorb the cancellation for large |x|. Throws OutOfRange for |x| > 64.
AiryEvaluation airy_ai_eval(const BigFloat& x, const PrecisionLevel& p);
BigFloat airy_ai(const BigFloat& x, const PrecisionLevel& p);
// Correctly rounded from the high-precision sum.
double airy_ai(double x);

// Ai(0) = 3^(-2/3) / Gamma(2/3) and Ai'(0) = -3^(-1/3) / Gamma(1/3) at `bits`.
BigFloat airy_ai_zero(long bits);
BigFloat airy_ai_prime_zero(long bits);

namespace detail {

// d-th derivative of the Maclaurin series, differentiated termwise
// (d = 0, 1, 2). Used by the defining-ODE self-test.
AiryEvaluation airy_series(const BigFloat& x, const PrecisionLevel& p, int derivative);

// Bits used for the summation at |x| for a given target precision.
long airy_working_bits(double abs_x, long target_bits);

}  // namespace detail

}  // namespace usm
