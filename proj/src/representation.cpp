#include "afflab/representation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "afflab/errors.hpp"

namespace afflab {

namespace {

bool is_zero_vector(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& t) { return sgn(t) == 0; });
}

bool term_key_less(const PsiTerm& l, const PsiTerm& r) {
  if (l.powers != r.powers) return l.powers < r.powers;
  return l.frequencies < r.frequencies;
}

bool same_key(const PsiTerm& l, const PsiTerm& r) { return l.powers == r.powers && l.frequencies == r.frequencies; }

GaussianRational monomial_term(const PsiTerm& term, std::span<const Rational> s) {
  Rational value = 1;
  for (std::size_t j = 0; j < term.powers.size(); ++j) {
    for (unsigned e = 0; e < term.powers[j]; ++e) value *= s[j];
  }
  return term.coefficient * GaussianRational(value);
}

Rational phase(const PsiTerm& term, std::span<const Rational> s) {
  Rational t = 0;
  for (std::size_t j = 0; j < term.frequencies.size(); ++j) t += term.frequencies[j] * s[j];
  return t;
}

void require_arity(const Psi& psi, std::span<const Rational> s) {
  if (s.size() != psi.arity()) throw std::invalid_argument("psi evaluated on the wrong number of slots");
}

}  // namespace

bool PsiTerm::is_polynomial() const { return is_zero_vector(frequencies); }

Psi::Psi(std::size_t arity) : arity_(arity) {}

Psi::Psi(std::size_t arity, std::vector<PsiTerm> terms) : arity_(arity), terms_(std::move(terms)) {
  for (auto& term : terms_) {
    if (term.powers.empty()) term.powers.assign(arity_, 0);
    if (term.frequencies.empty()) term.frequencies.assign(arity_, Rational(0));
    if (term.powers.size() != arity_ || term.frequencies.size() != arity_) {
      throw std::invalid_argument("psi term does not match the slot count");
    }
  }
  normalize();
}

void Psi::normalize() {
  std::stable_sort(terms_.begin(), terms_.end(), term_key_less);
  std::vector<PsiTerm> merged;
  for (auto& term : terms_) {
    if (!merged.empty() && same_key(merged.back(), term)) {
      merged.back().coefficient = merged.back().coefficient + term.coefficient;
    } else {
      merged.push_back(std::move(term));
    }
  }
  std::erase_if(merged, [](const PsiTerm& t) { return t.coefficient.is_zero(); });
  terms_ = std::move(merged);
}

Psi Psi::constant(std::size_t arity, GaussianRational value) { return Psi(arity, {PsiTerm{std::move(value), {}, {}}}); }

Psi Psi::slot(std::size_t arity, std::size_t j) {
  if (j >= arity) throw std::out_of_range("psi slot index out of range");
  std::vector<unsigned> powers(arity, 0);
  powers[j] = 1;
  return Psi(arity, {PsiTerm{GaussianRational(1), std::move(powers), {}}});
}

Psi Psi::character(std::vector<Rational> frequencies) {
  std::size_t arity = frequencies.size();
  return Psi(arity, {PsiTerm{GaussianRational(1), std::vector<unsigned>(arity, 0), std::move(frequencies)}});
}

bool Psi::is_polynomial() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PsiTerm& t) { return t.is_polynomial(); });
}

std::optional<GaussianRational> Psi::constant_value() const {
  if (terms_.empty()) return GaussianRational(0);
  if (terms_.size() > 1) return std::nullopt;
  const PsiTerm& term = terms_.front();
  bool flat = std::all_of(term.powers.begin(), term.powers.end(), [](unsigned e) { return e == 0; });
  if (!flat || !term.is_polynomial()) return std::nullopt;
  return term.coefficient;
}

std::complex<double> Psi::evaluate(std::span<const Rational> s) const {
  require_arity(*this, s);
  std::complex<double> total = 0;
  for (const auto& term : terms_) {
    std::complex<double> value = monomial_term(term, s).to_complex();
    if (!term.is_polynomial()) value *= std::polar(1.0, phase(term, s).get_d());
    total += value;
  }
  return total;
}

GaussianRational Psi::evaluate_exact(std::span<const Rational> s) const {
  require_arity(*this, s);
  if (!is_polynomial()) throw NotInExactClass("psi has an oscillating factor");
  GaussianRational total;
  for (const auto& term : terms_) total = total + monomial_term(term, s);
  return total;
}

Rational Psi::squared_magnitude(std::span<const Rational> s) const {
  require_arity(*this, s);
  // |e^{i theta} P(s)|^2 = |P(s)|^2 when every term shares the same phase.
  for (const auto& term : terms_) {
    if (term.frequencies != terms_.front().frequencies) {
      throw NotInExactClass("psi mixes several frequencies; |psi|^2 is not rational");
    }
  }
  GaussianRational total;
  for (const auto& term : terms_) total = total + monomial_term(term, s);
  return total.norm();
}

Psi Psi::conj() const {
  std::vector<PsiTerm> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) {
    PsiTerm c{term.coefficient.conj(), term.powers, term.frequencies};
    for (auto& t : c.frequencies) t = -t;
    out.push_back(std::move(c));
  }
  return Psi(arity_, std::move(out));
}

Psi Psi::embed(std::size_t offset, std::size_t arity) const {
  if (offset + arity_ > arity) throw std::invalid_argument("psi embedding does not fit");
  std::vector<PsiTerm> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) {
    PsiTerm wide{term.coefficient, std::vector<unsigned>(arity, 0), std::vector<Rational>(arity, Rational(0))};
    std::copy(term.powers.begin(), term.powers.end(), wide.powers.begin() + static_cast<long>(offset));
    std::copy(term.frequencies.begin(), term.frequencies.end(), wide.frequencies.begin() + static_cast<long>(offset));
    out.push_back(std::move(wide));
  }
  return Psi(arity, std::move(out));
}

Psi operator+(const Psi& l, const Psi& r) {
  if (l.arity_ != r.arity_) throw std::invalid_argument("psi sum over different slot counts");
  std::vector<PsiTerm> terms = l.terms_;
  terms.insert(terms.end(), r.terms_.begin(), r.terms_.end());
  return Psi(l.arity_, std::move(terms));
}

Psi operator*(const Psi& l, const Psi& r) {
  if (l.arity_ != r.arity_) throw std::invalid_argument("psi product over different slot counts");
  std::vector<PsiTerm> terms;
  terms.reserve(l.terms_.size() * r.terms_.size());
  for (const auto& a : l.terms_) {
    for (const auto& b : r.terms_) {
      PsiTerm t{a.coefficient * b.coefficient, a.powers, a.frequencies};
      for (std::size_t j = 0; j < l.arity_; ++j) {
        t.powers[j] += b.powers[j];
        t.frequencies[j] += b.frequencies[j];
      }
      terms.push_back(std::move(t));
    }
  }
  return Psi(l.arity_, std::move(terms));
}

bool operator==(const Psi& l, const Psi& r) {
  if (l.arity_ != r.arity_ || l.terms_.size() != r.terms_.size()) return false;
  for (std::size_t i = 0; i < l.terms_.size(); ++i) {
    if (!same_key(l.terms_[i], r.terms_[i]) || !(l.terms_[i].coefficient == r.terms_[i].coefficient)) return false;
  }
  return true;
}

namespace {

void require_mark(const StepFunction& f, const char* what) {
  if (f.default_value() != 1) throw std::invalid_argument(std::string(what) + " must default to 1");
  for (const auto& piece : f.pieces()) {
    if (sgn(piece.value) < 0) throw std::invalid_argument(std::string(what) + " takes a negative value");
  }
}

std::vector<Rational> slot_values(const RepFunction& f, const Configuration& gamma) {
  std::vector<Rational> s;
  s.reserve(f.slots().size());
  for (const auto& slot : f.slots()) s.push_back(pairing(slot, gamma));
  return s;
}

std::optional<Rational> exact_sqrt(const Rational& x) {
  if (sgn(x) < 0) return std::nullopt;
  const mpz_class& num = x.get_num();
  const mpz_class& den = x.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Rational(rn, rd);
}

}  // namespace

RepFunction::RepFunction(Prime p, GaussianRational coefficient, Rational log_factor, StepFunction multiplicative,
                         StepFunction root_multiplicative, std::vector<StepFunction> slots, Psi psi)
    : prime_(p),
      coefficient_(std::move(coefficient)),
      log_factor_(std::move(log_factor)),
      phi_(std::move(multiplicative)),
      sigma_(std::move(root_multiplicative)),
      slots_(std::move(slots)),
      psi_(std::move(psi)) {
  if (phi_.prime() != p || sigma_.prime() != p) throw PrimeMismatch("functional parts over different primes");
  require_mark(phi_, "multiplicative part");
  require_mark(sigma_, "root part");
  for (const auto& slot : slots_) {
    if (slot.prime() != p) throw PrimeMismatch("functional slot over a different prime");
    if (sgn(slot.default_value()) != 0) throw std::invalid_argument("slot functions must default to 0");
  }
  if (psi_.arity() != slots_.size()) throw std::invalid_argument("psi arity differs from the slot count");
}

RepFunction RepFunction::one(Prime p) {
  return RepFunction(p, GaussianRational(1), Rational(0), constant(p, 1), constant(p, 1), {}, Psi::constant(0, 1));
}

RepFunction RepFunction::multiplicative(StepFunction phi, GaussianRational coefficient) {
  Prime p = phi.prime();
  return RepFunction(p, std::move(coefficient), Rational(0), std::move(phi), constant(p, 1), {}, Psi::constant(0, 1));
}

RepFunction RepFunction::cylinder(std::vector<StepFunction> slots, Psi psi) {
  if (slots.empty()) throw std::invalid_argument("a cylinder functional needs at least one slot");
  Prime p = slots.front().prime();
  return RepFunction(p, GaussianRational(1), Rational(0), constant(p, 1), constant(p, 1), std::move(slots),
                     std::move(psi));
}

std::vector<ScenarioObject> RepFunction::objects() const {
  std::vector<ScenarioObject> out{phi_, sigma_};
  for (const auto& slot : slots_) out.emplace_back(slot);
  return out;
}

RepFunction multiply(const RepFunction& f, const RepFunction& g) {
  if (f.prime() != g.prime()) throw PrimeMismatch("multiply: functionals over different primes");
  StepFunction phi = f.multiplicative() * g.multiplicative();
  StepFunction sigma = constant(f.prime(), 1);
  if (f.root_multiplicative() == g.root_multiplicative()) {
    phi = phi * f.root_multiplicative();
  } else {
    sigma = f.root_multiplicative() * g.root_multiplicative();
  }
  std::vector<StepFunction> slots(f.slots().begin(), f.slots().end());
  slots.insert(slots.end(), g.slots().begin(), g.slots().end());
  std::size_t n = slots.size();
  Psi psi = f.psi().embed(0, n) * g.psi().embed(f.slots().size(), n);
  return RepFunction(f.prime(), f.coefficient() * g.coefficient(), f.log_factor() + g.log_factor(), std::move(phi),
                     std::move(sigma), std::move(slots), std::move(psi));
}

RepFunction conjugate(const RepFunction& f) {
  return RepFunction(f.prime(), f.coefficient().conj(), f.log_factor(), f.multiplicative(), f.root_multiplicative(),
                     std::vector<StepFunction>(f.slots().begin(), f.slots().end()), f.psi().conj());
}

RepFunction squared_magnitude(const RepFunction& f) { return multiply(f, conjugate(f)); }

std::complex<double> evaluate(const RepFunction& f, const Configuration& gamma) {
  auto s = slot_values(f, gamma);
  Rational phi = multiplicative_value(f.multiplicative(), gamma);
  Rational sigma = multiplicative_value(f.root_multiplicative(), gamma);
  double scale = phi.get_d() * std::sqrt(sigma.get_d()) * std::exp(f.log_factor().get_d());
  return f.coefficient().to_complex() * scale * f.psi().evaluate(s);
}

GaussianRational evaluate_exact(const RepFunction& f, const Configuration& gamma) {
  if (sgn(f.log_factor()) != 0) throw NotInExactClass("functional carries an exponential prefactor");
  auto s = slot_values(f, gamma);
  auto root = exact_sqrt(multiplicative_value(f.root_multiplicative(), gamma));
  if (!root) throw NotInExactClass("root part is not a perfect square on this configuration");
  Rational real = multiplicative_value(f.multiplicative(), gamma) * *root;
  return f.coefficient() * GaussianRational(real) * f.psi().evaluate_exact(s);
}

double SquaredValue::value() const { return factor.get_d() * std::exp(log_factor.get_d()); }

SquaredValue squared_value(const RepFunction& f, const Configuration& gamma) {
  auto s = slot_values(f, gamma);
  Rational phi = multiplicative_value(f.multiplicative(), gamma);
  Rational factor = f.coefficient().norm() * phi * phi * multiplicative_value(f.root_multiplicative(), gamma) *
                    f.psi().squared_magnitude(s);
  return SquaredValue{factor, 2 * f.log_factor()};
}

RepFunction apply_V(const AffineElement& g, const RepFunction& f) {
  if (g.prime() != f.prime()) throw PrimeMismatch("apply_V: prime mismatch");
  std::vector<StepFunction> slots;
  slots.reserve(f.slots().size());
  for (const auto& slot : f.slots()) slots.push_back(pullback(slot, g));
  return RepFunction(f.prime(), f.coefficient(), f.log_factor(), pullback(f.multiplicative(), g),
                     pullback(f.root_multiplicative(), g), std::move(slots), f.psi());
}

RadonNikodym radon_nikodym(const AffineElement& g, const Configuration& gamma) {
  Rational product = multiplicative_value(pushforward_density(g), gamma);
  Rational exponent = mass_defect(g);
  return RadonNikodym{product, exponent, product.get_d() * std::exp(exponent.get_d())};
}

RepFunction apply_U(const AffineElement& g, const RepFunction& f, InverseMode mode) {
  AffineElement inverse = mode == InverseMode::motion ? inverse_motion(g) : inverse_pointwise(g);
  RepFunction v = apply_V(g, f);
  Rational log_factor = v.log_factor() + mass_defect(inverse) / 2;
  StepFunction sigma = v.root_multiplicative() * pushforward_density(inverse);
  return RepFunction(v.prime(), v.coefficient(), log_factor, v.multiplicative(), std::move(sigma),
                     std::vector<StepFunction>(v.slots().begin(), v.slots().end()), v.psi());
}

ExpectationResult expectation_exact(const RepFunction& f) {
  auto c = f.psi().constant_value();
  if (!c) throw NotInExactClass("exact expectation needs a constant cylinder part");
  if (!f.root_multiplicative().is_constant()) throw NotInExactClass("exact expectation needs a trivial root part");
  ExpectationResult result;
  result.kind = ExpectationKind::exact;
  result.exponent = f.log_factor() + integrate(f.multiplicative() - constant(f.prime(), 1));
  result.coefficient = f.coefficient() * *c;
  result.value = result.coefficient->to_complex() * std::exp(result.exponent->get_d());
  return result;
}

ExpectationResult expectation_mc(const RepFunction& f, const McPlan& plan) {
  auto objects = f.objects();
  auto window = window_for(objects);
  long resolution = sampling_resolution(objects);
  auto est = estimate(window, resolution, plan, [&f](const Configuration& gamma) { return evaluate(f, gamma); });
  ExpectationResult result;
  result.kind = ExpectationKind::monte_carlo;
  result.value = est.mean;
  result.std_error = est.std_error;
  result.n = est.n;
  result.seed = est.seed;
  return result;
}

ExpectationResult inner_product(const RepFunction& f, const RepFunction& g, InnerProductMode mode,
                                const McPlan& plan) {
  RepFunction product = multiply(f, conjugate(g));
  return mode == InnerProductMode::exact ? expectation_exact(product) : expectation_mc(product, plan);
}

}  // namespace afflab
