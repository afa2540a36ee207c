#include "usm/scalar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "usm/error.hpp"

namespace usm {

namespace {

thread_local long t_default_bits = kDefaultExtendedBits;

long max_prec(const BigFloat& a, const BigFloat& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

long default_precision() { return t_default_bits; }

PrecisionScope::PrecisionScope(long bits) : saved_(t_default_bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) {
    fail(ErrorCode::InvalidArgument, "precision out of range: " + std::to_string(bits));
  }
  t_default_bits = bits;
}

PrecisionScope::~PrecisionScope() { t_default_bits = saved_; }

BigFloat::BigFloat(Uninit, long bits) { mpfr_init2(v_, bits); }

BigFloat::BigFloat() : BigFloat(Uninit{}, t_default_bits) {
  mpfr_set_zero(v_, +1);
}

BigFloat::BigFloat(double x) : BigFloat(Uninit{}, t_default_bits) {
  mpfr_set_d(v_, x, MPFR_RNDN);
}

BigFloat::BigFloat(std::string_view decimal, long bits) : BigFloat(Uninit{}, bits) {
  std::string s(decimal);
  char* end = nullptr;
  if (!s.empty()) mpfr_strtofr(v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (s.empty() || end == s.c_str() || *end != '\0') {
    fail(ErrorCode::ParseError, "not a decimal number: '" + s + "'");
  }
}

BigFloat::BigFloat(const BigFloat& other) : BigFloat(Uninit{}, other.precision()) {
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept : BigFloat(Uninit{}, other.precision()) {
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    if (precision() != other.precision()) mpfr_set_prec(v_, other.precision());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::zero(long bits) {
  BigFloat r(Uninit{}, bits);
  mpfr_set_zero(r.v_, +1);
  return r;
}

BigFloat BigFloat::pow2(long exponent, long bits) {
  BigFloat r(Uninit{}, bits);
  mpfr_set_ui_2exp(r.v_, 1, exponent, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::rounded(long bits) const {
  BigFloat r(Uninit{}, bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

std::string BigFloat::to_string(int digits) const {
  if (digits <= 0) {
    digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * 0.30103)) + 1;
  }
  std::string fmt = "%." + std::to_string(digits) + "Rg";
  char* out = nullptr;
  mpfr_asprintf(&out, fmt.c_str(), v_);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, rhs.precision(), MPFR_RNDN);
  mpfr_add(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, rhs.precision(), MPFR_RNDN);
  mpfr_sub(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, rhs.precision(), MPFR_RNDN);
  mpfr_mul(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, rhs.precision(), MPFR_RNDN);
  mpfr_div(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat BigFloat::operator-() const {
  BigFloat r(Uninit{}, precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::Uninit{}, max_prec(a, b));
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::Uninit{}, max_prec(a, b));
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::Uninit{}, max_prec(a, b));
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  BigFloat r(BigFloat::Uninit{}, max_prec(a, b));
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

BigFloat abs(const BigFloat& x) {
  BigFloat r = x;
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}

BigFloat sqrt(const BigFloat& x) {
  BigFloat r = x;
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat cbrt(const BigFloat& x) {
  BigFloat r = x;
  mpfr_cbrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat hypot(const BigFloat& a, const BigFloat& b) {
  BigFloat r = BigFloat::zero(max_prec(a, b));
  mpfr_hypot(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat ldexp(const BigFloat& x, int exponent) {
  BigFloat r = x;
  mpfr_mul_2si(r.get(), x.get(), exponent, MPFR_RNDN);
  return r;
}

bool isfinite(const BigFloat& x) { return x.is_finite(); }

PrecisionLevel PrecisionLevel::extended(long bits) {
  if (bits < kDefaultExtendedBits) {
    fail(ErrorCode::InvalidArgument,
         "extended precision needs at least 256 bits, got " + std::to_string(bits));
  }
  return {Kind::Extended, bits};
}

BigFloat machine_epsilon(const PrecisionLevel& p) {
  return BigFloat::pow2(1 - p.significand_bits(), 64);
}

double machine_epsilon_working() { return std::numeric_limits<double>::epsilon(); }

double min_subnormal(const PrecisionLevel& p) {
  if (p.is_extended()) {
    fail(ErrorCode::Unsupported, "min_subnormal is only defined for Working64");
  }
  return std::numeric_limits<double>::denorm_min();
}

BigFloat promote(double x, const PrecisionLevel& p) {
  if (!p.is_extended()) {
    fail(ErrorCode::InvalidArgument, "promote target must be an Extended level");
  }
  BigFloat r = BigFloat::zero(p.extended_bits);
  mpfr_set_d(r.get(), x, MPFR_RNDN);
  return r;
}

double demote(const BigFloat& x) { return x.to_double(); }

double ScalarTraits<double>::parse(std::string_view text) {
  // Correctly rounded decimal -> binary64.
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::ParseError, "not a decimal number: '" + std::string(text) + "'");
  }
  return value;
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::SingularMatrix: return "singular matrix";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::BoundInapplicable: return "bound inapplicable";
    case ErrorCode::DenseCutoff: return "dense diagnostics cutoff exceeded";
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::IoError: return "I/O error";
  }
  return "unknown error";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace usm
