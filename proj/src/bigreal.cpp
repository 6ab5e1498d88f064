#include "nsbtune/bigreal.hpp"

#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace nsbtune {

BigReal::BigReal(mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_zero(v_, 1);
}

BigReal::BigReal(double v, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(v_); }

BigReal BigReal::from_decimal(std::string_view text, mpfr_prec_t prec) {
  BigReal r(prec);
  std::string s(text);
  if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("malformed decimal literal '" + s + "'");
  }
  return r;
}

void BigReal::round_to_precision(mpfr_prec_t prec) {
  mpfr_prec_round(v_, prec, MPFR_RNDN);
}

int BigReal::ufp() const {
  if (!mpfr_regular_p(v_)) return 0;
  // MPFR normalizes to 0.1xxx * 2^exp, so the leading bit weighs 2^(exp-1).
  return static_cast<int>(mpfr_get_exp(v_) - 1);
}

std::string BigReal::to_string(int digits) const {
  if (is_zero()) return "0";
  std::vector<char> buf(static_cast<size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
  return buf.data();
}

BigReal BigReal::abs() const {
  BigReal r(precision());
  mpfr_abs(r.v_, v_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigReal add(const BigReal& a, const BigReal& b, mpfr_prec_t prec) {
  BigReal r(prec);
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigReal sub(const BigReal& a, const BigReal& b, mpfr_prec_t prec) {
  BigReal r(prec);
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigReal mul(const BigReal& a, const BigReal& b, mpfr_prec_t prec) {
  BigReal r(prec);
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

}  // namespace nsbtune
