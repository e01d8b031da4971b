#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "afflab/affine.hpp"
#include "afflab/monte_carlo.hpp"
#include "afflab/poisson.hpp"
#include "afflab/rational.hpp"
#include "afflab/step_function.hpp"

namespace afflab {

struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational real, Rational imag = Rational(0)) : re(std::move(real)), im(std::move(imag)) {}
  GaussianRational(long real) : re(real) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  Rational norm() const { return re * re + im * im; }
  GaussianRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  friend bool operator==(const GaussianRational&, const GaussianRational&) = default;
  friend GaussianRational operator+(const GaussianRational& l, const GaussianRational& r) {
    return {l.re + r.re, l.im + r.im};
  }
  friend GaussianRational operator*(const GaussianRational& l, const GaussianRational& r) {
    return {l.re * r.re - l.im * r.im, l.re * r.im + l.im * r.re};
  }
};

/// One term c * prod s_j^{e_j} * exp(i * sum t_j s_j).
struct PsiTerm {
  GaussianRational coefficient;
  std::vector<unsigned> powers;
  std::vector<Rational> frequencies;

  bool is_polynomial() const;
};

/// Finite sums of PsiTerm over a fixed number of slots. Closed under sums,
/// products and conjugation; this is the cylinder part of a RepFunction.
class Psi {
 public:
  explicit Psi(std::size_t arity = 0);
  Psi(std::size_t arity, std::vector<PsiTerm> terms);

  static Psi constant(std::size_t arity, GaussianRational value);
  /// s -> s_j
  static Psi slot(std::size_t arity, std::size_t j);
  /// s -> exp(i * sum t_j s_j)
  static Psi character(std::vector<Rational> frequencies);

  std::size_t arity() const noexcept { return arity_; }
  std::span<const PsiTerm> terms() const noexcept { return terms_; }
  /// All frequencies zero.
  bool is_polynomial() const;
  /// Set when the expression does not depend on its slots.
  std::optional<GaussianRational> constant_value() const;

  std::complex<double> evaluate(std::span<const Rational> s) const;
  /// Exact value; throws NotInExactClass unless polynomial.
  GaussianRational evaluate_exact(std::span<const Rational> s) const;
  /// |psi(s)|^2 exactly; needs all terms to share one frequency vector.
  Rational squared_magnitude(std::span<const Rational> s) const;

  Psi conj() const;
  /// Same expression read on slots [offset, offset + arity) of a wider list.
  Psi embed(std::size_t offset, std::size_t arity) const;

  friend Psi operator+(const Psi& l, const Psi& r);
  friend Psi operator*(const Psi& l, const Psi& r);
  friend bool operator==(const Psi&, const Psi&);

 private:
  void normalize();

  std::size_t arity_;
  std::vector<PsiTerm> terms_;
};

/// F(gamma) = c * exp(l) * prod phi(x) * prod sqrt(sigma(x)) * psi(<f_1,gamma>, ..., <f_n,gamma>).
/// phi and sigma are non-negative marks with default 1; the f_j default to 0.
/// sigma carries square roots of densities so that |F|^2 stays rational.
class RepFunction {
 public:
  RepFunction(Prime p, GaussianRational coefficient, Rational log_factor, StepFunction multiplicative,
              StepFunction root_multiplicative, std::vector<StepFunction> slots, Psi psi);

  static RepFunction one(Prime p);
  static RepFunction multiplicative(StepFunction phi, GaussianRational coefficient = GaussianRational(1));
  static RepFunction cylinder(std::vector<StepFunction> slots, Psi psi);

  Prime prime() const noexcept { return prime_; }
  const GaussianRational& coefficient() const noexcept { return coefficient_; }
  const Rational& log_factor() const noexcept { return log_factor_; }
  const StepFunction& multiplicative() const noexcept { return phi_; }
  const StepFunction& root_multiplicative() const noexcept { return sigma_; }
  std::span<const StepFunction> slots() const noexcept { return slots_; }
  const Psi& psi() const noexcept { return psi_; }

  /// Every step function the functional reads, for windows and resolutions.
  std::vector<ScenarioObject> objects() const;

  friend bool operator==(const RepFunction&, const RepFunction&) = default;

 private:
  Prime prime_;
  GaussianRational coefficient_;
  Rational log_factor_;
  StepFunction phi_;
  StepFunction sigma_;
  std::vector<StepFunction> slots_;
  Psi psi_;
};

/// Pointwise product; equal root parts are folded into the multiplicative part.
RepFunction multiply(const RepFunction& f, const RepFunction& g);
RepFunction conjugate(const RepFunction& f);
/// |F|^2 as a functional of the class (root part folded, psi times its conjugate).
RepFunction squared_magnitude(const RepFunction& f);

std::complex<double> evaluate(const RepFunction& f, const Configuration& gamma);
/// Throws NotInExactClass when the value is not a Gaussian rational
/// (non-zero log factor, oscillating psi, or a non-square root part).
GaussianRational evaluate_exact(const RepFunction& f, const Configuration& gamma);

/// |F(gamma)|^2 = factor * exp(log_factor).
struct SquaredValue {
  Rational factor;
  Rational log_factor;

  double value() const;
  friend bool operator==(const SquaredValue&, const SquaredValue&) = default;
};
SquaredValue squared_value(const RepFunction& f, const Configuration& gamma);

RepFunction apply_V(const AffineElement& g, const RepFunction& f);

/// R(g, gamma) = product * exp(exponent).
struct RadonNikodym {
  Rational product;
  Rational exponent;
  double value;
};
RadonNikodym radon_nikodym(const AffineElement& g, const Configuration& gamma);

enum class InverseMode { motion, pointwise };

/// U_g F = R(g^{-1}, .)^{1/2} V_g F. Motion mode throws NonBijectiveElement for
/// non-bijective g; pointwise mode takes the coefficient-wise inverse unchecked.
RepFunction apply_U(const AffineElement& g, const RepFunction& f, InverseMode mode = InverseMode::motion);

enum class ExpectationKind { exact, monte_carlo };

struct ExpectationResult {
  ExpectationKind kind = ExpectationKind::exact;
  /// Exact kind: value = coefficient * exp(exponent).
  std::optional<Rational> exponent;
  std::optional<GaussianRational> coefficient;
  std::complex<double> value;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

/// Needs a constant psi and a trivial root part; throws NotInExactClass otherwise.
ExpectationResult expectation_exact(const RepFunction& f);
ExpectationResult expectation_mc(const RepFunction& f, const McPlan& plan);

enum class InnerProductMode { exact, monte_carlo };

/// E[F conj(G)].
ExpectationResult inner_product(const RepFunction& f, const RepFunction& g, InnerProductMode mode,
                                const McPlan& plan = {});

}  // namespace afflab
