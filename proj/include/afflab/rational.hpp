#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace afflab {

using Rational = mpq_class;
using Integer = mpz_class;

/// The prime of the base field Q_p. Construction validates primality.
class Prime {
 public:
  explicit Prime(long p);

  long value() const noexcept { return p_; }
  unsigned long uvalue() const noexcept { return static_cast<unsigned long>(p_); }

  friend bool operator==(Prime, Prime) = default;

 private:
  long p_;
};

/// p-adic valuation. An empty optional is +infinity (the valuation of 0).
using Valuation = std::optional<long>;

Valuation valuation(const Integer& x, Prime p);
Valuation valuation(const Rational& x, Prime p);

/// p^e as an exact rational; e may be negative.
Rational prime_power(Prime p, long e);

/// |x|_p = p^{-v_p(x)}, and |0|_p = 0.
Rational padic_norm(const Rational& x, Prime p);

/// Representative of the level-k ball around x: the truncation of x's p-adic
/// expansion to digits at positions < -k. Two rationals lie in the same ball of
/// level k iff their representatives agree.
Rational residue_representative(const Rational& x, long level, Prime p);

/// Canonical text form "num/den" with den > 0 and gcd 1.
std::string to_string(const Rational& x);

/// Accepts "n", "n/d", optionally signed, surrounding whitespace ignored.
Rational parse_rational(std::string_view text);

std::strong_ordering compare(const Rational& a, const Rational& b);

}  // namespace afflab
