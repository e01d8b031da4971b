#include <gtest/gtest.h>

#include "afflab/affine.hpp"
#include "afflab/errors.hpp"
#include "afflab/generators.hpp"

using namespace afflab;

namespace {

const Prime p3(3);

Rational q(const char* text) { return parse_rational(text); }
Region ball(const char* c, long level, Prime p = p3) { return Region(Ball(q(c), level, p)); }

AffineElement on_ball(const Region& r, const Rational& a, const Rational& b) {
  std::vector<AffineCell> cells{AffineCell{r, Coeffs{a, b}}};
  return AffineElement::from_cells(r.prime(), cells);
}

AffineElement scaling3() { return on_ball(ball("0", 0), 3, 0); }

AffineElement swap01() {
  std::vector<AffineCell> cells{{ball("0", -1), {1, 1}}, {ball("1", -1), {1, -1}}};
  return AffineElement::from_cells(p3, cells);
}

Rational sample(ScenarioGenerator& gen, long level = 2, long resolution = -6) {
  return sample_uniform(Region(Ball(0, level, gen.prime())), resolution, gen.rng());
}

}  // namespace

TEST(Identity, IsNeutral) {
  auto e = AffineElement::identity(p3);
  ScenarioGenerator gen(p3, RandomStream(1));
  for (int i = 0; i < 50; ++i) {
    Rational x = sample(gen);
    EXPECT_EQ(act_point(e, x), x);
  }
  auto g = gen.stratified(3);
  EXPECT_EQ(product_pointwise(e, g), g);
  EXPECT_EQ(product_pointwise(g, e), g);
  EXPECT_EQ(pushforward_density(e), constant(p3, 1));
}

TEST(Section, SpecExamples) {
  AffineElement g(constant(p3, 1) + indicator(ball("0", 0), 2), constant(p3, 0));
  EXPECT_EQ(section(g, 0), std::make_pair(Rational(3), Rational(0)));
  EXPECT_EQ(section(g, q("1/9")), std::make_pair(Rational(1), Rational(0)));
  AffineElement h(constant(p3, 1), indicator(ball("0", 0), 5));
  EXPECT_EQ(section(h, 1), std::make_pair(Rational(1), Rational(5)));
}

TEST(ActPoint, SpecExamples) {
  auto shift = AffineElement::translation(ball("0", -1), 1);
  EXPECT_EQ(act_point(shift, 0), 1);
  EXPECT_EQ(act_point(shift, 1), 1);
  EXPECT_EQ(act_point(scaling3(), 1), q("1/3"));
}

TEST(ProductPointwise, SpecExamples) {
  auto g2 = on_ball(ball("0", 0), 2, 3);
  auto g1 = on_ball(ball("0", 0), 4, 5);
  auto prod = product_pointwise(g2, g1);
  EXPECT_EQ(section(prod, 0), std::make_pair(Rational(8), Rational(17)));
  EXPECT_EQ(section(prod, q("1/3")), std::make_pair(Rational(1), Rational(0)));
  EXPECT_EQ(product_pointwise(inverse_pointwise(g2), g2), AffineElement::identity(p3));
}

TEST(ProductMotion, DivergesFromPointwiseProduct) {
  // g1 moves Z_3 by 1 (a bijection of Z_3), g2 moves only B(1,-1) by 1.
  auto g1 = AffineElement::translation(ball("0", 0), 1);
  auto g2 = AffineElement::translation(ball("1", -1), 1);
  auto motion = product_motion(g2, g1);
  auto pointwise = product_pointwise(g2, g1);
  EXPECT_EQ(act_point(motion, 0), 2);     // 0 -> 1 -> 2
  EXPECT_EQ(act_point(pointwise, 0), 1);  // b1(0) + b2(0) = 1
  EXPECT_NE(motion, pointwise);
}

TEST(ProductMotion, IdentityIsNeutral) {
  ScenarioGenerator gen(p3, RandomStream(2));
  auto e = AffineElement::identity(p3);
  for (int i = 0; i < 10; ++i) {
    auto g = gen.stratified(i);
    EXPECT_EQ(product_motion(g, e), g);
    EXPECT_EQ(product_motion(e, g), g);
  }
}

TEST(InversePointwise, SpecExamples) {
  auto g = on_ball(ball("0", 0), 2, 6);
  auto inv = inverse_pointwise(g);
  EXPECT_EQ(section(inv, 0), std::make_pair(q("1/2"), Rational(-3)));
  EXPECT_EQ(section(inv, q("1/3")), std::make_pair(Rational(1), Rational(0)));
  EXPECT_EQ(inverse_pointwise(AffineElement::identity(p3)), AffineElement::identity(p3));
  EXPECT_EQ(product_pointwise(g, inv), AffineElement::identity(p3));
}

TEST(InverseMotion, SpecExamples) {
  EXPECT_EQ(inverse_motion(swap01()), swap01());
  EXPECT_EQ(inverse_motion(AffineElement::identity(p3)), AffineElement::identity(p3));
  EXPECT_THROW(inverse_motion(scaling3()), NonBijectiveElement);
}

TEST(IsBijective, SpecExamples) {
  EXPECT_TRUE(is_bijective(AffineElement::translation(ball("0", -1), 3)).verdict);
  auto away = AffineElement::translation(ball("0", -1), 5);
  auto cert = is_bijective(away);
  EXPECT_FALSE(cert.verdict);
  ASSERT_EQ(cert.images.size(), 1u);
  EXPECT_EQ(cert.images[0], ball("2", -1));
  EXPECT_FALSE(cert.uncovered.empty());
  EXPECT_TRUE(cert.uncovered.same_set(RegionSet(ball("2", -1))));
  EXPECT_TRUE(is_bijective(AffineElement::identity(p3)).verdict);
  EXPECT_TRUE(is_bijective(swap01()).verdict);
}

TEST(PushforwardDensity, SpecExamples) {
  auto rho = pushforward_density(scaling3());
  EXPECT_EQ(rho(0), q("1/3"));
  EXPECT_EQ(rho(q("1/3")), q("4/3"));
  EXPECT_EQ(rho(q("1/9")), 1);
  EXPECT_EQ(pushforward_density(swap01()), constant(p3, 1));
  auto shift = pushforward_density(AffineElement::translation(ball("0", -1), 1));
  EXPECT_EQ(shift(0), 0);
  EXPECT_EQ(shift(1), 2);
  EXPECT_EQ(shift(2), 1);
  EXPECT_EQ(shift(q("1/3")), 1);
}

TEST(MassDefect, SpecExamples) {
  EXPECT_EQ(mass_defect(scaling3()), 0);
  EXPECT_EQ(mass_defect(AffineElement::identity(p3)), 0);
  EXPECT_EQ(rn_integrability(AffineElement::identity(p3)), 0);
  EXPECT_EQ(rn_integrability(scaling3()), q("4/3"));
  EXPECT_EQ(rn_integrability(swap01()), 0);
}

class AffineProperties : public ::testing::TestWithParam<long> {};

TEST_P(AffineProperties, PointwiseProductIsAGroup) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(10 + p.value()));
  auto e = AffineElement::identity(p);
  for (int i = 0; i < 100; ++i) {
    auto a = gen.stratified(i), b = gen.stratified(i + 1), c = gen.stratified(i + 2);
    EXPECT_EQ(product_pointwise(product_pointwise(a, b), c), product_pointwise(a, product_pointwise(b, c)));
    EXPECT_EQ(product_pointwise(a, e), a);
    EXPECT_EQ(product_pointwise(inverse_pointwise(a), a), e);
    EXPECT_EQ(product_pointwise(a, inverse_pointwise(a)), e);
  }
}

TEST_P(AffineProperties, MotionProductComposesPointMaps) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(20 + p.value()));
  for (int i = 0; i < 60; ++i) {
    auto g1 = gen.stratified(i), g2 = gen.stratified(i + 2);
    auto w = product_motion(g2, g1);
    for (int k = 0; k < 100; ++k) {
      Rational x = sample(gen);
      ASSERT_EQ(act_point(w, x), act_point(g2, act_point(g1, x)));
    }
  }
}

TEST_P(AffineProperties, PointwiseFormulaComposesConstantSections) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(30 + p.value()));
  for (int i = 0; i < 60; ++i) {
    auto g1 = gen.stratified(i), g2 = gen.stratified(i + 1);
    auto prod = product_pointwise(g2, g1);
    for (int k = 0; k < 20; ++k) {
      Rational x = sample(gen);
      auto [a1, b1] = section(g1, x);
      auto [a2, b2] = section(g2, x);
      Rational y = (x + b1) / a1;
      Rational composed = (y + b2) / a2;  // both sections frozen at x
      EXPECT_EQ(act_point(prod, x), composed);
    }
  }
}

TEST_P(AffineProperties, DensityChainRuleAndMassDefect) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(40 + p.value()));
  for (int i = 0; i < 60; ++i) {
    auto g1 = gen.stratified(i), g2 = gen.stratified(i + 3);
    auto f = gen.step();
    auto w = product_motion(g2, g1);
    EXPECT_EQ(integrate(f * pushforward_density(w)), integrate(pullback(f, g2) * pushforward_density(g1)));
    EXPECT_EQ(integrate(pullback(f, w)), integrate(f * pushforward_density(w)));
    EXPECT_EQ(mass_defect(g1), 0);
    EXPECT_EQ(mass_defect(w), 0);
  }
}

TEST_P(AffineProperties, BijectiveElementsHavePositiveDensityAndAdjoint) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(50 + p.value()));
  for (int i = 0; i < 60; ++i) {
    auto g = i % 2 ? gen.bijective() : gen.element(ElementKind::composite);
    ASSERT_TRUE(is_bijective(g).verdict);
    auto rho = pushforward_density(g);
    EXPECT_GT(rho.default_value(), 0);
    for (const auto& piece : rho.pieces()) EXPECT_GT(piece.value, 0);
    auto inv = inverse_motion(g);
    auto h = gen.step();
    EXPECT_EQ(integrate(pullback(h, g) * pushforward_density(inv)), integrate(h));
    for (int k = 0; k < 20; ++k) {
      Rational x = sample(gen);
      EXPECT_EQ(act_point(inv, act_point(g, x)), x);
      EXPECT_EQ(act_point(g, act_point(inv, x)), x);
    }
  }
}

TEST_P(AffineProperties, NonBijectiveKindIsCaught) {
  Prime p(GetParam());
  ScenarioGenerator gen(p, RandomStream(60 + p.value()));
  for (int i = 0; i < 40; ++i) {
    auto g = gen.element(ElementKind::non_bijective);
    auto cert = is_bijective(g);
    EXPECT_FALSE(cert.verdict);
    EXPECT_TRUE(cert.overlapping || !cert.uncovered.empty());
    EXPECT_THROW(inverse_motion(g), NonBijectiveElement);
  }
}

INSTANTIATE_TEST_SUITE_P(Primes, AffineProperties, ::testing::Values(2L, 3L, 5L));
