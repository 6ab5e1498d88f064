// Multi-precision binary real with value semantics, backed by MPFR.
//
// Every value is exactly m * 2^e for an integer m with at most precision()
// bits; operations round to the destination precision, nearest-even.

#pragma once

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace nsbtune {

/// Precision of the reference interpreter used for range analysis and as
/// the validation oracle.
inline constexpr mpfr_prec_t kReferencePrecision = 160;

/// Working precision of the emulator before per-label rounding. Products of
/// two 113-bit significands are exact at this width.
inline constexpr mpfr_prec_t kWorkPrecision = 320;

class BigReal {
 public:
  explicit BigReal(mpfr_prec_t prec = kReferencePrecision);
  BigReal(double v, mpfr_prec_t prec);
  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  /// Parses a decimal literal, rounding to nearest at `prec` bits.
  /// Throws std::invalid_argument on malformed text.
  static BigReal from_decimal(std::string_view text,
                              mpfr_prec_t prec = kReferencePrecision);

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  /// Changes precision, rounding the held value to nearest.
  void round_to_precision(mpfr_prec_t prec);

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_negative() const { return mpfr_sgn(v_) < 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  /// floor(log2 |x|), read from the binary exponent; 0 for x == 0.
  int ufp() const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Scientific decimal with `digits` significant digits.
  std::string to_string(int digits = 20) const;

  BigReal abs() const;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  friend bool operator==(const BigReal& a, const BigReal& b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);

 private:
  mpfr_t v_;
};

/// Sum/difference/product of exactly representable values; the result is
/// exact whenever it fits in `prec` bits.
BigReal add(const BigReal& a, const BigReal& b, mpfr_prec_t prec);
BigReal sub(const BigReal& a, const BigReal& b, mpfr_prec_t prec);
BigReal mul(const BigReal& a, const BigReal& b, mpfr_prec_t prec);

}  // namespace nsbtune
