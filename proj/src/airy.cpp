#include "usm/airy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usm/error.hpp"

namespace usm {

namespace {

constexpr int kQuietRun = 40;
constexpr std::size_t kMaxTerms = 100000;

// n (n-1) ... (n-d+1)
long falling(long n, int d) {
  long r = 1;
  for (int i = 0; i < d; ++i) r *= n - i;
  return r;
}

BigFloat power(const BigFloat& x, long e, long bits) {
  BigFloat r = BigFloat::zero(bits);
  mpfr_pow_ui(r.get(), x.get(), static_cast<unsigned long>(e), MPFR_RNDN);
  return r;
}

}  // namespace

// The constants are formed at the full working precision: for large
// positive x the two series cancel to about exp(-4/3 x^1.5), so Ai(0) and
// Ai'(0) must carry that many more bits than the result.
BigFloat airy_ai_zero(long bits) {
  const long guard = bits + 32;
  BigFloat third = BigFloat::zero(guard), g = BigFloat::zero(guard), c = BigFloat::zero(guard);
  mpfr_set_ui(third.get(), 2, MPFR_RNDN);
  mpfr_div_ui(third.get(), third.get(), 3, MPFR_RNDN);  // 2/3
  mpfr_gamma(g.get(), third.get(), MPFR_RNDN);
  mpfr_set_ui(c.get(), 9, MPFR_RNDN);
  mpfr_cbrt(c.get(), c.get(), MPFR_RNDN);  // 3^(2/3)
  mpfr_mul(c.get(), c.get(), g.get(), MPFR_RNDN);
  mpfr_ui_div(c.get(), 1, c.get(), MPFR_RNDN);
  return c.rounded(bits);
}

BigFloat airy_ai_prime_zero(long bits) {
  const long guard = bits + 32;
  BigFloat third = BigFloat::zero(guard), g = BigFloat::zero(guard), c = BigFloat::zero(guard);
  mpfr_set_ui(third.get(), 1, MPFR_RNDN);
  mpfr_div_ui(third.get(), third.get(), 3, MPFR_RNDN);  // 1/3
  mpfr_gamma(g.get(), third.get(), MPFR_RNDN);
  mpfr_set_ui(c.get(), 3, MPFR_RNDN);
  mpfr_cbrt(c.get(), c.get(), MPFR_RNDN);  // 3^(1/3)
  mpfr_mul(c.get(), c.get(), g.get(), MPFR_RNDN);
  mpfr_si_div(c.get(), -1, c.get(), MPFR_RNDN);
  return c.rounded(bits);
}

namespace detail {

long airy_working_bits(double abs_x, long target_bits) {
  // The partial sums reach about exp(2/3 |x|^1.5) while Ai(x) is about
  // exp(-2/3 |x|^1.5), so that many bits cancel for large positive x.
  const double loss = (4.0 / 3.0) * std::pow(abs_x, 1.5) * std::log2(std::exp(1.0));
  return std::max(4 * target_bits, target_bits + static_cast<long>(std::ceil(loss)) + 64);
}

AiryEvaluation airy_series(const BigFloat& x, const PrecisionLevel& p, int derivative) {
  if (derivative < 0 || derivative > 2) {
    fail(ErrorCode::InvalidArgument, "airy_series: derivative order must be 0, 1 or 2");
  }
  if (!x.is_finite() || abs(x) > BigFloat(kAiryMaxAbsArgument)) {
    fail(ErrorCode::OutOfRange, "airy_ai: |x| = " + x.to_string(6) + " exceeds the validated range 64");
  }
  const long target = p.significand_bits();
  const long work = airy_working_bits(std::fabs(x.to_double()), target);
  PrecisionScope scope(work);

  const BigFloat xw = x.rounded(work);
  const BigFloat c1 = airy_ai_zero(work);
  const BigFloat c2 = airy_ai_prime_zero(work);
  const BigFloat tol = BigFloat::pow2(1 - target, 64);

  // F = sum a_k x^(3k), G = sum b_k x^(3k+1), Ai = c1 F + c2 G.
  BigFloat a(1), b(1);
  BigFloat sum = BigFloat::zero(work);
  std::size_t k = 0;
  int quiet = 0;
  for (; k < kMaxTerms && quiet < kQuietRun; ++k) {
    const long ef = 3 * static_cast<long>(k);
    const long eg = ef + 1;
    BigFloat term = BigFloat::zero(work);
    if (ef >= derivative) {
      term += c1 * a * BigFloat(falling(ef, derivative)) * power(xw, ef - derivative, work);
    }
    if (eg >= derivative) {
      term += c2 * b * BigFloat(falling(eg, derivative)) * power(xw, eg - derivative, work);
    }
    sum += term;
    if (abs(term) <= tol * abs(sum)) {
      ++quiet;
    } else {
      quiet = 0;
    }
    const long kk = static_cast<long>(k);
    a /= BigFloat((3 * kk + 2) * (3 * kk + 3));
    b /= BigFloat((3 * kk + 3) * (3 * kk + 4));
  }
  if (quiet < kQuietRun) fail(ErrorCode::OutOfRange, "airy_ai: series did not settle");

  AiryEvaluation out;
  out.x = x;
  out.precision = p;
  out.value = sum.rounded(target);
  out.terms_used = k;
  return out;
}

}  // namespace detail

AiryEvaluation airy_ai_eval(const BigFloat& x, const PrecisionLevel& p) {
  return detail::airy_series(x, p, 0);
}

BigFloat airy_ai(const BigFloat& x, const PrecisionLevel& p) { return airy_ai_eval(x, p).value; }

double airy_ai(double x) {
  PrecisionScope scope(64);
  return airy_ai_eval(BigFloat(x), PrecisionLevel::working64()).value.to_double();
}

}  // namespace usm
