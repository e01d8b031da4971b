#include "afflab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace afflab {

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  std::string digits(s);
  bool ok = !digits.empty();
  for (std::size_t i = 0; i < digits.size() && ok; ++i) {
    char c = digits[i];
    ok = std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && (c == '-' || c == '+') && digits.size() > 1);
  }
  if (!ok) throw std::invalid_argument("not a rational: \"" + std::string(whole) + "\"");
  if (digits.front() == '+') digits.erase(0, 1);
  return Integer(digits, 10);
}

}  // namespace

Prime::Prime(long p) : p_(p) {
  if (!is_prime(p)) throw std::invalid_argument("not a prime: " + std::to_string(p));
}

Valuation valuation(const Integer& x, Prime p) {
  if (sgn(x) == 0) return std::nullopt;
  Integer stripped;
  Integer base(p.value());
  return static_cast<long>(mpz_remove(stripped.get_mpz_t(), x.get_mpz_t(), base.get_mpz_t()));
}

Valuation valuation(const Rational& x, Prime p) {
  if (sgn(x) == 0) return std::nullopt;
  return *valuation(x.get_num(), p) - *valuation(x.get_den(), p);
}

Rational prime_power(Prime p, long e) {
  Integer power;
  unsigned long magnitude = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_ui_pow_ui(power.get_mpz_t(), p.uvalue(), magnitude);
  if (e >= 0) return Rational(power);
  return Rational(Integer(1), power);
}

Rational padic_norm(const Rational& x, Prime p) {
  auto v = valuation(x, p);
  if (!v) return Rational(0);
  return prime_power(p, -*v);
}

Rational residue_representative(const Rational& x, long level, Prime p) {
  // Work with y = x p^{level}; the answer is frac_p(y) p^{-level}.
  Rational y = x * prime_power(p, level);
  y.canonicalize();
  Integer den_unit;
  Integer base(p.value());
  auto s = mpz_remove(den_unit.get_mpz_t(), y.get_den().get_mpz_t(), base.get_mpz_t());
  if (s == 0) return Rational(0);
  Integer modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), p.uvalue(), s);
  Integer inverse;
  mpz_invert(inverse.get_mpz_t(), den_unit.get_mpz_t(), modulus.get_mpz_t());
  Integer t = y.get_num() * inverse;
  mpz_mod(t.get_mpz_t(), t.get_mpz_t(), modulus.get_mpz_t());
  Rational frac(t, modulus);
  frac.canonicalize();
  return frac * prime_power(p, -level);
}

std::string to_string(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(s, text));
  Integer num = parse_integer(trim(s.substr(0, slash)), text);
  Integer den = parse_integer(trim(s.substr(slash + 1)), text);
  if (sgn(den) == 0) throw std::invalid_argument("zero denominator: \"" + std::string(text) + "\"");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::strong_ordering compare(const Rational& a, const Rational& b) {
  int c = cmp(a, b);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace afflab
