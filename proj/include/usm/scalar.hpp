#pragma once

#include <mpfr.h>

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace usm {

// Extended-precision real backed by MPFR, round-to-nearest throughout.
//
// Every newly constructed value takes the calling thread's default
// precision (see PrecisionScope). Binary operations produce a result at the
// larger precision of their operands. Copy and assignment copy the precision
// together with the value.
class BigFloat {
 public:
  BigFloat();
  BigFloat(double x);  // NOLINT: implicit, exact for precision >= 53
  template <std::signed_integral I>
  BigFloat(I x) : BigFloat() {  // NOLINT
    mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN);
  }
  template <std::unsigned_integral I>
  BigFloat(I x) : BigFloat() {  // NOLINT
    mpfr_set_ui(v_, static_cast<unsigned long>(x), MPFR_RNDN);
  }
  // Parses a decimal literal ("1e-2", "-0.25") rounded to `bits`.
  BigFloat(std::string_view decimal, long bits);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  static BigFloat zero(long bits);
  // 2^exponent, exact.
  static BigFloat pow2(long exponent, long bits);

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  // Re-rounds the value to `bits`.
  BigFloat rounded(long bits) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string to_string(int digits = 0) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);

  BigFloat operator-() const;

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);

  friend bool operator==(const BigFloat& a, const BigFloat& b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend bool operator<(const BigFloat& a, const BigFloat& b) {
    return mpfr_less_p(a.v_, b.v_) != 0;
  }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return b < a; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) {
    return mpfr_lessequal_p(a.v_, b.v_) != 0;
  }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return b <= a; }

 private:
  struct Uninit {};
  BigFloat(Uninit, long bits);

  mpfr_t v_;
};

BigFloat abs(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat cbrt(const BigFloat& x);
BigFloat hypot(const BigFloat& a, const BigFloat& b);
BigFloat ldexp(const BigFloat& x, int exponent);
bool isfinite(const BigFloat& x);

// Thread-local default precision used for newly constructed BigFloats.
long default_precision();

// RAII override of the thread's default BigFloat precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(long bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  long saved_;
};

inline constexpr long kDefaultExtendedBits = 256;

struct PrecisionLevel {
  enum class Kind { Working64, Extended };

  Kind kind = Kind::Working64;
  long extended_bits = kDefaultExtendedBits;

  static PrecisionLevel working64() { return {Kind::Working64, 0}; }
  // Throws InvalidArgument for fewer than 256 bits.
  static PrecisionLevel extended(long bits = kDefaultExtendedBits);

  long significand_bits() const {
    return kind == Kind::Working64 ? 53 : extended_bits;
  }
  bool is_extended() const { return kind == Kind::Extended; }
};

// 2^(1 - significand bits), exactly representable at the level.
BigFloat machine_epsilon(const PrecisionLevel& p);
double machine_epsilon_working();
// 2^-1074. Only defined for Working64; Extended throws Unsupported.
double min_subnormal(const PrecisionLevel& p);

// Exact embedding of a binary64 value at an Extended level.
BigFloat promote(double x, const PrecisionLevel& p);
// Round-to-nearest back to binary64; the identity on promoted values.
double demote(const BigFloat& x);

// Uniform access to the two scalar types used by the templated numerics.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double epsilon() { return machine_epsilon_working(); }
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  static double parse(std::string_view text);
  static long bits() { return 53; }
};

template <>
struct ScalarTraits<BigFloat> {
  static BigFloat epsilon() { return BigFloat::pow2(1 - default_precision(), 64); }
  static BigFloat from_double(double x) { return BigFloat(x); }
  static double to_double(const BigFloat& x) { return x.to_double(); }
  static BigFloat parse(std::string_view text) {
    return BigFloat(text, default_precision());
  }
  static long bits() { return default_precision(); }
};

template <class T>
concept RealScalar = std::same_as<T, double> || std::same_as<T, BigFloat>;

}  // namespace usm
