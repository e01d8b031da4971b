#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "afflab/errors.hpp"
#include "afflab/random.hpp"
#include "afflab/region.hpp"

using namespace afflab;

namespace {

const Prime p2(2), p3(3), p5(5);

Rational q(const char* text) { return parse_rational(text); }

// Oracle: x lies in B(c, k) iff (x - c) p^k has a denominator prime to p.
bool oracle_member(const Rational& x, const Rational& c, long k, Prime p) {
  Rational scaled = (x - c);
  Integer pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p.uvalue(), static_cast<unsigned long>(std::labs(k)));
  if (k >= 0) scaled *= pk; else scaled /= pk;
  scaled.canonicalize();
  return mpz_divisible_ui_p(scaled.get_den().get_mpz_t(), p.uvalue()) == 0;
}

std::vector<Ball> descendants(const Ball& root, int depth) {
  std::vector<Ball> all{root};
  std::vector<Ball> frontier{root};
  for (int d = 0; d < depth; ++d) {
    std::vector<Ball> next;
    for (const auto& b : frontier) {
      for (auto& c : split(b)) next.push_back(c);
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

}  // namespace

TEST(Valuation, SpecExamples) {
  EXPECT_EQ(valuation(Rational(9), p3), 2);
  EXPECT_EQ(valuation(q("1/3"), p3), -1);
  EXPECT_FALSE(valuation(Rational(0), p3).has_value());
  EXPECT_EQ(valuation(q("-50/7"), p5), 2);
  EXPECT_EQ(padic_norm(Rational(3), p3), q("1/3"));
}

TEST(Rational, CanonicalText) {
  EXPECT_EQ(to_string(q("6/-4")), "-3/2");
  EXPECT_EQ(to_string(q(" 9 ")), "9/1");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(Prime(9), std::invalid_argument);
}

TEST(Ball, CanonicalCenter) {
  EXPECT_EQ(Ball(Rational(5), 0, p3), Ball(Rational(0), 0, p3));
  EXPECT_EQ(Ball(Rational(4), -1, p3).center(), Rational(1));
  EXPECT_EQ(Ball(q("1/3"), 0, p3).center(), q("1/3"));
  EXPECT_EQ(Ball(q("-1/3"), 0, p3).center(), q("2/3"));
}

TEST(Relate, SpecExamples) {
  EXPECT_EQ(relate(Ball(0, -1, p3), Ball(1, -1, p3)), BallRelation::disjoint);
  EXPECT_EQ(relate(Ball(0, -1, p3), Ball(0, 0, p3)), BallRelation::first_inside);
  EXPECT_EQ(relate(Ball(0, 0, p3), Ball(5, 0, p3)), BallRelation::equal);
  EXPECT_EQ(relate(Ball(0, 0, p3), Ball(0, -1, p3)), BallRelation::second_inside);
  EXPECT_THROW(relate(Ball(0, 0, p3), Ball(0, 0, p5)), PrimeMismatch);
}

TEST(Relate, DisjointWitnessedByMembershipOracle) {
  RandomStream rng(11);
  Region whole(Ball(0, 1, p3));
  for (int i = 0; i < 500; ++i) {
    Rational x = sample_uniform(whole, -4, rng);
    EXPECT_FALSE(oracle_member(x, 0, -1, p3) && oracle_member(x, 1, -1, p3));
  }
  EXPECT_TRUE(oracle_member(Rational(5), 0, 0, p3));
}

TEST(Split, SpecExamples) {
  auto children = split(Ball(0, 0, p3));
  ASSERT_EQ(children.size(), 3u);
  EXPECT_EQ(children[0], Ball(0, -1, p3));
  EXPECT_EQ(children[1], Ball(1, -1, p3));
  EXPECT_EQ(children[2], Ball(2, -1, p3));
  auto halves = split(Ball(0, 0, p2));
  ASSERT_EQ(halves.size(), 2u);
  EXPECT_EQ(halves[0], Ball(0, -1, p2));
  EXPECT_EQ(halves[1], Ball(1, -1, p2));
  for (const auto& c : children) {
    for (long r = 0; r < 3; ++r) EXPECT_EQ(c.contains(Rational(r)), oracle_member(r, c.center(), -1, p3));
  }
}

TEST(Measure, SpecExamples) {
  EXPECT_EQ(Ball(0, 0, p3).measure(), 1);
  EXPECT_EQ(Ball(0, 2, p3).measure(), 9);
  EXPECT_EQ(Region(Ball(0, 0, p3), {Ball(0, -1, p3)}).measure(), q("2/3"));
}

TEST(AffineImage, SpecExamples) {
  EXPECT_EQ(affine_image(Ball(0, 0, p3), 3, 0), Ball(0, 1, p3));
  EXPECT_EQ(affine_image(Ball(0, -1, p3), 1, 1), Ball(1, -1, p3));
  EXPECT_EQ(affine_image(Ball(q("2/9"), -2, p3), 1, 0), Ball(q("2/9"), -2, p3));
  EXPECT_THROW(affine_image(Ball(0, 0, p3), 0, 1), std::domain_error);
}

TEST(AffineImage, ImagesOfSampledPointsLandInside) {
  RandomStream rng(3);
  for (Prime p : {p2, p3, p5}) {
    Ball ball(q("1/5"), 0, p);
    for (int i = 0; i < 50; ++i) {
      Rational a = Rational(rng.between(1, 40), rng.between(1, 40));
      Rational b = Rational(rng.between(-30, 30), rng.between(1, 12));
      Ball image = affine_image(ball, a, b);
      Rational x = sample_uniform(Region(ball), ball.level() - 3, rng);
      Rational y = (x + b) / a;
      EXPECT_TRUE(oracle_member(y, image.center(), image.level(), p));
      // measure(image) * |a|_p == measure(ball)
      EXPECT_EQ(image.measure() * padic_norm(a, p), ball.measure());
    }
  }
}

TEST(Ultrametric, DichotomyExhaustiveToDepthThree) {
  RandomStream rng(5);
  for (Prime p : {p2, p3, p5}) {
    auto balls = descendants(Ball(0, 1, p), 3);
    std::vector<Rational> probes;
    for (int i = 0; i < 60; ++i) probes.push_back(sample_uniform(Region(Ball(0, 1, p)), -3, rng));
    for (const auto& a : balls) {
      for (const auto& b : balls) {
        auto r = relate(a, b);
        for (const auto& x : probes) {
          bool in_a = oracle_member(x, a.center(), a.level(), p);
          bool in_b = oracle_member(x, b.center(), b.level(), p);
          switch (r) {
            case BallRelation::disjoint: EXPECT_FALSE(in_a && in_b); break;
            case BallRelation::equal: EXPECT_EQ(in_a, in_b); break;
            case BallRelation::first_inside: EXPECT_TRUE(!in_a || in_b); break;
            case BallRelation::second_inside: EXPECT_TRUE(!in_b || in_a); break;
          }
        }
      }
    }
  }
}

TEST(Ultrametric, MeasureAdditivityOverChildren) {
  for (Prime p : {p2, p3, p5}) {
    for (const auto& ball : descendants(Ball(q("1/9"), 2, p), 2)) {
      Rational total = 0;
      for (const auto& c : split(ball)) total += c.measure();
      EXPECT_EQ(total, ball.measure());
    }
  }
}

TEST(Region, RejectsBadExclusions) {
  EXPECT_THROW(Region(Ball(0, 0, p3), {Ball(1, 1, p3)}), std::invalid_argument);
  EXPECT_THROW(Region(Ball(0, 0, p3), {Ball(0, -1, p3), Ball(3, -2, p3)}), std::invalid_argument);
  EXPECT_THROW(Region(Ball(0, 0, p3), {Ball(0, -1, p3), Ball(1, -1, p3), Ball(2, -1, p3)}), std::invalid_argument);
  EXPECT_FALSE(Region::make(Ball(0, 0, p2), {Ball(0, -1, p2), Ball(1, -1, p2)}).has_value());
}

TEST(RegionSet, CanonicalFormIsUniquePerSet) {
  // B(0,0) \ {B(1,-1), B(2,-1)} is the ball B(0,-1).
  RegionSet punctured(Region(Ball(0, 0, p3), {Ball(1, -1, p3), Ball(2, -1, p3)}));
  EXPECT_EQ(*punctured.as_region(), Region(Ball(0, -1, p3)));
  // Two children of B(0,0) form B(0,0) minus the third.
  RegionSet pair(std::vector<Region>{Region(Ball(0, -1, p3)), Region(Ball(1, -1, p3))});
  EXPECT_EQ(*pair.as_region(), Region(Ball(0, 0, p3), {Ball(2, -1, p3)}));
  // Order of parts does not matter.
  RegionSet swapped(std::vector<Region>{Region(Ball(1, -1, p3)), Region(Ball(0, -1, p3))});
  EXPECT_EQ(pair.as_region(), swapped.as_region());
  EXPECT_TRUE(RegionSet().canonical().empty());
}

TEST(RegionSet, AlgebraAgreesWithPointwiseOracle) {
  RandomStream rng(17);
  const Ball root(0, 1, p3);
  auto balls = descendants(root, 3);
  auto random_region = [&] {
    const Ball& base = balls[rng.below(balls.size())];
    std::vector<Ball> holes;
    for (const auto& b : balls) {
      if (relate(b, base) == BallRelation::first_inside && rng.coin(0.15)) holes.push_back(b);
    }
    auto r = Region::make(base, holes);
    return r ? RegionSet(*r) : RegionSet();
  };
  for (int trial = 0; trial < 200; ++trial) {
    RegionSet a = random_region().unite(random_region());
    RegionSet b = random_region();
    RegionSet inter = a.intersect(b), diff = a.minus(b), uni = a.unite(b), canon = uni.canonical();
    EXPECT_EQ(inter.measure() + diff.measure(), a.measure());
    EXPECT_EQ(uni.measure(), canon.measure());
    EXPECT_TRUE(canon.same_set(uni));
    for (int i = 0; i < 20; ++i) {
      Rational x = sample_uniform(Region(root), -3, rng);
      bool in_a = a.contains(x), in_b = b.contains(x);
      EXPECT_EQ(inter.contains(x), in_a && in_b);
      EXPECT_EQ(diff.contains(x), in_a && !in_b);
      EXPECT_EQ(canon.contains(x), in_a || in_b);
    }
  }
}

TEST(SampleUniform, HaarProportionOfSubBall) {
  RandomStream rng(2024);
  const int n = 100000;
  int hits = 0;
  Ball sub(0, -1, p3);
  for (int i = 0; i < n; ++i) hits += sub.contains(sample_uniform(Region(Ball(0, 0, p3)), -3, rng));
  double prob = 1.0 / 3.0;
  double sigma = std::sqrt(prob * (1 - prob) / n);
  EXPECT_LE(std::abs(hits / double(n) - prob), 4 * sigma);
}

TEST(SampleUniform, ExclusionsNeverSampled) {
  RandomStream rng(8);
  Region punctured(Ball(0, 0, p3), {Ball(0, -1, p3)});
  for (int i = 0; i < 2000; ++i) {
    Rational x = sample_uniform(punctured, -2, rng);
    EXPECT_FALSE(oracle_member(x, 0, -1, p3));
  }
}

TEST(SampleUniform, DeterministicPerSeed) {
  RandomStream a(7), b(7), c(8);
  Region region(Ball(0, 1, p5));
  std::vector<Rational> xs, ys, zs;
  for (int i = 0; i < 100; ++i) {
    xs.push_back(sample_uniform(region, -2, a));
    ys.push_back(sample_uniform(region, -2, b));
    zs.push_back(sample_uniform(region, -2, c));
  }
  EXPECT_EQ(xs, ys);
  EXPECT_NE(xs, zs);
}

TEST(SampleUniform, ResolutionTooCoarse) {
  RandomStream rng(1);
  Region region(Ball(0, 0, p3), {Ball(0, -3, p3)});
  EXPECT_THROW(sample_uniform(region, -2, rng), ResolutionError);
}

TEST(SampleUniform, CellCountsMatchHaarOnThirtyCellPartition) {
  // Partition of B(0,1) (p=3) into 27 level -2 cells plus ... = cells of mixed levels.
  RandomStream rng(99);
  std::vector<Ball> cells;
  for (const auto& child : split(Ball(0, 1, p3))) {
    if (child.center() == 0) {
      for (const auto& g : split(child)) {
        if (g.center() == 0) {
          for (const auto& gg : split(g)) cells.push_back(gg);
        } else {
          cells.push_back(g);
        }
      }
    } else {
      cells.push_back(child);
    }
  }
  ASSERT_LE(cells.size(), 30u);
  const int n = 100000;
  std::vector<int> counts(cells.size(), 0);
  for (int i = 0; i < n; ++i) {
    Rational x = sample_uniform(Region(Ball(0, 1, p3)), -4, rng);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].contains(x)) {
        ++counts[c];
        break;
      }
    }
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double prob = Rational(cells[c].measure() / Ball(0, 1, p3).measure()).get_d();
    double sigma = std::sqrt(prob * (1 - prob) / n);
    EXPECT_LE(std::abs(counts[c] / double(n) - prob), 4 * sigma) << "cell " << c;
  }
}
