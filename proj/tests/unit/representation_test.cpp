#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "afflab/errors.hpp"
#include "afflab/generators.hpp"
#include "afflab/representation.hpp"

using namespace afflab;

namespace {

const Prime p3(3);

Rational q(const char* text) { return parse_rational(text); }
Region ball(const char* c, long level, Prime p = p3) { return Region(Ball(q(c), level, p)); }

StepFunction mark(const Region& r, const char* value) {
  return StepFunction::from_disjoint(r.prime(), {{r, q(value)}}, Rational(1));
}

AffineElement scaling3() {
  std::vector<AffineCell> cells{AffineCell{ball("0", 0), Coeffs{3, 0}}};
  return AffineElement::from_cells(p3, cells);
}

AffineElement swap01() {
  std::vector<AffineCell> cells{{ball("0", -1), {1, 1}}, {ball("1", -1), {1, -1}}};
  return AffineElement::from_cells(p3, cells);
}

// A random functional mixing all parts; psi stays polynomial so values are exact.
RepFunction random_functional(ScenarioGenerator& gen) {
  std::vector<StepFunction> slots{gen.step(2), gen.step(2)};
  Psi psi = Psi::constant(2, GaussianRational(gen.value(), gen.value())) + Psi::slot(2, 0) * Psi::slot(2, 1) +
            Psi::constant(2, GaussianRational(0, 1)) * Psi::slot(2, 1);
  Prime p = gen.prime();
  return RepFunction(p, GaussianRational(gen.value()), Rational(0), gen.mark(2), constant(p, 1), std::move(slots), psi);
}

Configuration sample_for(const std::vector<ScenarioObject>& objects, ScenarioGenerator& gen) {
  return sample_configuration(window_for(objects), sampling_resolution(objects), gen.rng());
}

class ScopedThreads {
 public:
  explicit ScopedThreads(const char* value) {
    if (const char* old = std::getenv("AFFLAB_THREADS")) saved_ = old;
    ::setenv("AFFLAB_THREADS", value, 1);
  }
  ~ScopedThreads() {
    if (saved_) ::setenv("AFFLAB_THREADS", saved_->c_str(), 1);
    else ::unsetenv("AFFLAB_THREADS");
  }

 private:
  std::optional<std::string> saved_;
};

}  // namespace

TEST(Psi, AlgebraAndEvaluation) {
  Psi s0 = Psi::slot(2, 0), s1 = Psi::slot(2, 1);
  Psi poly = s0 * s0 + Psi::constant(2, 3) * s1;
  std::vector<Rational> s{2, 5};
  EXPECT_EQ(poly.evaluate_exact(s), GaussianRational(19));
  EXPECT_EQ(poly + Psi::constant(2, 0), poly);
  EXPECT_EQ((s0 + s1) * (s0 + s1), s0 * s0 + Psi::constant(2, 2) * s0 * s1 + s1 * s1);
  EXPECT_EQ(poly.conj(), poly);
  EXPECT_TRUE(Psi::constant(2, 4).constant_value());
  EXPECT_FALSE(poly.constant_value());

  Psi wave = Psi::character({q("1/2"), 1});
  auto value = wave.evaluate(s);
  EXPECT_NEAR(value.real(), std::cos(6.0), 1e-12);
  EXPECT_NEAR(value.imag(), std::sin(6.0), 1e-12);
  EXPECT_THROW(wave.evaluate_exact(s), NotInExactClass);
  EXPECT_EQ(wave.squared_magnitude(s), 1);
  EXPECT_EQ((wave * wave.conj()).constant_value(), GaussianRational(1));
  EXPECT_THROW((wave + Psi::constant(2, 1)).squared_magnitude(s), NotInExactClass);
  EXPECT_THROW(Psi::slot(1, 0) + s0, std::invalid_argument);
}

TEST(RepFunction, RejectsMalformedParts) {
  EXPECT_THROW(RepFunction::multiplicative(indicator(ball("0", 0))), std::invalid_argument);
  EXPECT_THROW(RepFunction::multiplicative(mark(ball("0", 0), "-2")), std::invalid_argument);
  EXPECT_THROW(RepFunction::cylinder({mark(ball("0", 0), "2")}, Psi::slot(1, 0)), std::invalid_argument);
  EXPECT_THROW(RepFunction::cylinder({indicator(ball("0", 0))}, Psi::slot(2, 0)), std::invalid_argument);
}

TEST(Evaluate, SpecExamples) {
  auto count = RepFunction::cylinder({indicator(ball("0", 0))}, Psi::slot(1, 0));
  EXPECT_EQ(evaluate_exact(count, Configuration({0, 9})), GaussianRational(2));
  EXPECT_EQ(evaluate(count, Configuration({0, 9})), std::complex<double>(2.0));

  auto twice = RepFunction::multiplicative(mark(ball("0", 0), "2"));
  EXPECT_EQ(evaluate_exact(twice, Configuration({0, q("1/3")})), GaussianRational(2));

  auto shifted = RepFunction::cylinder({indicator(ball("0", 0))}, Psi::slot(1, 0) + Psi::constant(1, 7));
  EXPECT_EQ(evaluate_exact(shifted, Configuration{}), GaussianRational(7));
}

TEST(ApplyV, SpecExamples) {
  ScenarioGenerator gen(p3, RandomStream(3));
  auto f = random_functional(gen);
  EXPECT_EQ(apply_V(AffineElement::identity(p3), f), f);

  // Support shift: g = (1, h 1_B) with Lambda inside B moves every part into Lambda - h.
  auto g = AffineElement::translation(ball("0", 0), 1);
  auto local = RepFunction::cylinder({indicator(ball("1", -1), 2)}, Psi::slot(1, 0));
  auto moved = apply_V(g, local);
  EXPECT_TRUE(moved.slots()[0].support().subset_of(RegionSet(ball("0", -1))));
}

TEST(RadonNikodym, SpecExamples) {
  auto empty = radon_nikodym(scaling3(), Configuration{});
  EXPECT_EQ(empty.product, 1);
  EXPECT_EQ(empty.exponent, 0);
  auto r = radon_nikodym(scaling3(), Configuration({0, q("1/3")}));
  EXPECT_EQ(r.product, q("4/9"));
  EXPECT_EQ(r.exponent, 0);
  EXPECT_DOUBLE_EQ(r.value, 4.0 / 9.0);
  EXPECT_EQ(radon_nikodym(swap01(), Configuration({0, 1, 5, q("1/3")})).product, 1);
}

TEST(ApplyU, SpecExamples) {
  ScenarioGenerator gen(p3, RandomStream(4));
  auto f = random_functional(gen);
  EXPECT_EQ(apply_U(swap01(), f), apply_V(swap01(), f));
  EXPECT_EQ(apply_U(AffineElement::identity(p3), f), f);
  EXPECT_THROW(apply_U(scaling3(), f), NonBijectiveElement);
  EXPECT_NO_THROW(apply_U(scaling3(), f, InverseMode::pointwise));
}

TEST(ExpectationExact, SpecExamples) {
  auto e = expectation_exact(RepFunction::multiplicative(mark(ball("0", 0), "2")));
  EXPECT_EQ(e.exponent, Rational(1));
  EXPECT_NEAR(e.value.real(), std::exp(1.0), 1e-12);

  auto c = expectation_exact(RepFunction::multiplicative(constant(p3, 1), GaussianRational(q("5/2"))));
  EXPECT_EQ(c.exponent, Rational(0));
  EXPECT_EQ(c.value, std::complex<double>(2.5));

  ScenarioGenerator gen(p3, RandomStream(5));
  for (int i = 0; i < 20; ++i) {
    auto g = gen.stratified(i);
    RepFunction r(p3, GaussianRational(1), mass_defect(g), pushforward_density(g), constant(p3, 1), {},
                  Psi::constant(0, 1));
    auto result = expectation_exact(r);
    EXPECT_EQ(result.exponent, Rational(0));
    EXPECT_EQ(result.coefficient, GaussianRational(1));
  }

  auto count = RepFunction::cylinder({indicator(ball("0", 0))}, Psi::slot(1, 0));
  EXPECT_THROW(expectation_exact(count), NotInExactClass);
}

TEST(ExpectationMc, SpecExamples) {
  auto one = expectation_mc(RepFunction::one(p3), McPlan{1000, 1, 4});
  EXPECT_EQ(one.value, std::complex<double>(1.0));
  EXPECT_EQ(one.std_error, 0.0);
  EXPECT_EQ(one.n, 1000u);

  auto phi = mark(ball("0", 0), "2") * mark(ball("1", -1), "1/2");
  auto f = RepFunction::multiplicative(phi);
  auto mc = expectation_mc(f, McPlan{100000, 2, 16});
  auto exact = expectation_exact(f);
  EXPECT_NEAR(mc.value.real(), exact.value.real(), 4 * mc.std_error);

  // Characteristic functional of the count in B(0,-1) at t = 1/2.
  auto wave = RepFunction::cylinder({indicator(ball("0", -1), q("1/2"))}, Psi::character({1}));
  auto cf = expectation_mc(wave, McPlan{100000, 3, 16});
  std::complex<double> target = std::exp((std::polar(1.0, 0.5) - 1.0) / 3.0);
  EXPECT_LE(std::abs(cf.value - target), 4 * cf.std_error);
}

TEST(ExpectationMc, DeterministicAcrossThreadCounts) {
  auto f = RepFunction::multiplicative(mark(ball("0", 0), "3"));
  McPlan plan{20000, 9, 8};
  ExpectationResult serial, parallel;
  {
    ScopedThreads t("1");
    serial = expectation_mc(f, plan);
  }
  {
    ScopedThreads t("4");
    parallel = expectation_mc(f, plan);
  }
  EXPECT_EQ(serial.value, parallel.value);
  EXPECT_EQ(serial.std_error, parallel.std_error);
}

TEST(ExpectationMc, ThreadEnvironmentIsValidated) {
  {
    ScopedThreads t("3");
    EXPECT_EQ(worker_threads(16), 3u);
    EXPECT_EQ(worker_threads(2), 2u);
  }
  {
    ScopedThreads t("zero");
    EXPECT_THROW(worker_threads(4), std::invalid_argument);
  }
}

TEST(InnerProduct, SpecExamples) {
  auto f = RepFunction::multiplicative(mark(ball("0", 0), "2"));
  EXPECT_EQ(inner_product(f, f, InnerProductMode::exact).exponent, Rational(3));
  auto one = RepFunction::one(p3);
  auto unit = inner_product(one, one, InnerProductMode::exact);
  EXPECT_EQ(unit.exponent, Rational(0));
  EXPECT_EQ(unit.value, std::complex<double>(1.0));

  ScenarioGenerator gen(p3, RandomStream(6));
  for (int i = 0; i < 20; ++i) {
    auto g = gen.bijective();
    auto h = RepFunction::multiplicative(gen.mark());
    auto u = apply_U(g, h);
    EXPECT_EQ(inner_product(u, u, InnerProductMode::exact).exponent, inner_product(h, h, InnerProductMode::exact).exponent);
  }
}

TEST(InnerProduct, NonBijectiveIsometryFails) {
  auto g = AffineElement::translation(ball("0", -1), 5);
  auto f = RepFunction::multiplicative(mark(ball("0", -1), "2"));
  auto u = apply_U(g, f, InverseMode::pointwise);
  EXPECT_EQ(inner_product(u, u, InnerProductMode::exact).exponent, Rational(0));
  EXPECT_EQ(inner_product(f, f, InnerProductMode::exact).exponent, Rational(1));
}

class RepresentationProperties : public ::testing::TestWithParam<long> {};

TEST_P(RepresentationProperties, Covariance) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(500 + p.value()));
  for (int trial = 0; trial < 60; ++trial) {
    auto f = random_functional(gen);
    auto g = gen.stratified(trial);
    auto objects = f.objects();
    objects.emplace_back(g);
    auto vf = apply_V(g, f);
    for (int i = 0; i < 10; ++i) {
      auto gamma = sample_for(objects, gen);
      ASSERT_EQ(evaluate_exact(vf, gamma), evaluate_exact(f, push_configuration(g, gamma))) << "trial " << trial;
    }
  }
}

TEST_P(RepresentationProperties, PushforwardLemmaAtClassLevel) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(600 + p.value()));
  for (int trial = 0; trial < 60; ++trial) {
    auto phi = gen.mark();
    auto g = gen.stratified(trial);
    auto lhs = expectation_exact(apply_V(g, RepFunction::multiplicative(phi)));
    EXPECT_EQ(*lhs.exponent, laplace_exact_wrt(phi, pushforward_density(g)).exponent);
  }
}

TEST_P(RepresentationProperties, SquaredMagnitudeCocycle) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(700 + p.value()));
  for (int trial = 0; trial < 20; ++trial) {
    auto g1 = gen.bijective(), g2 = gen.bijective();
    auto f = random_functional(gen);
    auto lhs = apply_U(g2, apply_U(g1, f));
    auto rhs = apply_U(product_motion(g1, g2), f);
    auto objects = f.objects();
    objects.emplace_back(g1);
    objects.emplace_back(g2);
    for (int i = 0; i < 20; ++i) {
      auto gamma = sample_for(objects, gen);
      ASSERT_EQ(squared_value(lhs, gamma), squared_value(rhs, gamma)) << "trial " << trial;
      auto inv = inverse_motion(g1);
      auto rn = radon_nikodym(inv, gamma);
      auto u = squared_value(apply_U(g1, f), gamma);
      auto v = squared_value(apply_V(g1, f), gamma);
      ASSERT_EQ(u.factor, rn.product * v.factor);
    }
  }
}

TEST_P(RepresentationProperties, IsometryExponents) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(800 + p.value()));
  for (int trial = 0; trial < 50; ++trial) {
    auto g = trial % 2 ? gen.bijective() : gen.element(ElementKind::composite);
    auto phi = gen.mark();
    auto rho_inv = pushforward_density(inverse_motion(g));
    auto gphi = pullback(phi, g);
    auto one = constant(p, 1);
    EXPECT_EQ(integrate(rho_inv * gphi * gphi - one), integrate(phi * phi - one));
  }
}

INSTANTIATE_TEST_SUITE_P(Primes, RepresentationProperties, ::testing::Values(2L, 3L, 5L));
