#include "afflab/generators.hpp"

#include <algorithm>

namespace afflab {

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::translation: return "translation";
    case ElementKind::swap: return "swap";
    case ElementKind::unit_scaling: return "unit_scaling";
    case ElementKind::non_bijective: return "non_bijective";
    case ElementKind::composite: return "composite";
  }
  return "unknown";
}

ScenarioGenerator::ScenarioGenerator(Prime p, RandomStream rng, long window_level, long depth)
    : prime_(p), rng_(std::move(rng)), window_level_(window_level), depth_(depth) {}

Ball ScenarioGenerator::ball(long min_level, long max_level) {
  long level = rng_.between(min_level, max_level);
  Region window(Ball(0, window_level_, prime_));
  return Ball(sample_uniform(window, level, rng_), level, prime_);
}

Ball ScenarioGenerator::ball_inside(const Ball& outer) {
  long finest = std::min(outer.level() - 1, window_level_ - depth_);
  long level = rng_.between(std::min(finest, outer.level() - 1), outer.level() - 1);
  return Ball(sample_uniform(Region(outer), level, rng_), level, prime_);
}

Rational ScenarioGenerator::value() {
  static const long dens[] = {1, 1, 2, 3, 4, 5, 7, 9};
  long num = rng_.between(-6, 6);
  if (num == 0) num = 1;
  Rational v(num, dens[rng_.below(std::size(dens))]);
  v.canonicalize();
  return v;
}

Rational ScenarioGenerator::mark_value() {
  static const char* marks[] = {"0", "1/2", "2", "3", "1/3", "5/2", "3/4", "4"};
  return parse_rational(marks[rng_.below(std::size(marks))]);
}

StepFunction ScenarioGenerator::step(int max_pieces) {
  std::vector<StepFunction::Piece> pieces;
  int n = static_cast<int>(rng_.between(1, max_pieces));
  for (int i = 0; i < n; ++i) pieces.push_back({Region(ball()), value()});
  // Nested pieces on the same ball would be inconsistent; keep the first.
  std::vector<StepFunction::Piece> unique;
  for (auto& piece : pieces) {
    bool clash = std::any_of(unique.begin(), unique.end(), [&](const auto& u) { return u.region == piece.region; });
    if (!clash) unique.push_back(std::move(piece));
  }
  return StepFunction::normalize(prime_, std::move(unique), Rational(0));
}

StepFunction ScenarioGenerator::step_inside(const Ball& where, int max_pieces) {
  std::vector<StepFunction::Piece> pieces;
  int n = static_cast<int>(rng_.between(1, max_pieces));
  for (int i = 0; i < n; ++i) {
    Ball b = rng_.coin(0.3) ? where : ball_inside(where);
    bool clash = std::any_of(pieces.begin(), pieces.end(), [&](const auto& u) { return u.region.base() == b; });
    if (!clash) pieces.push_back({Region(b), value()});
  }
  return StepFunction::normalize(prime_, std::move(pieces), Rational(0));
}

StepFunction ScenarioGenerator::mark(int max_pieces) {
  std::vector<StepFunction::Piece> pieces;
  int n = static_cast<int>(rng_.between(1, max_pieces));
  for (int i = 0; i < n; ++i) {
    Ball b = ball();
    bool clash = std::any_of(pieces.begin(), pieces.end(), [&](const auto& u) { return u.region.base() == b; });
    if (!clash) pieces.push_back({Region(b), mark_value()});
  }
  return StepFunction::normalize(prime_, std::move(pieces), Rational(1));
}

StepFunction ScenarioGenerator::mark_inside(const Ball& where, int max_pieces) {
  std::vector<StepFunction::Piece> pieces;
  int n = static_cast<int>(rng_.between(1, max_pieces));
  for (int i = 0; i < n; ++i) {
    Ball b = rng_.coin(0.3) ? where : ball_inside(where);
    bool clash = std::any_of(pieces.begin(), pieces.end(), [&](const auto& u) { return u.region.base() == b; });
    if (!clash) pieces.push_back({Region(b), mark_value()});
  }
  return StepFunction::normalize(prime_, std::move(pieces), Rational(1));
}

Rational ScenarioGenerator::unit() {
  // Rationals with numerator and denominator prime to p, other than 1.
  while (true) {
    long num = rng_.between(-9, 9);
    long den = rng_.between(1, 9);
    if (num == 0 || num % prime_.value() == 0 || den % prime_.value() == 0) continue;
    Rational u(num, den);
    u.canonicalize();
    if (u != 1) return u;
  }
}

Rational ScenarioGenerator::shift_within(long level) {
  // Nonzero h with |h|_p <= p^level.
  long exponent = rng_.between(-level, -level + 2);
  return unit() * prime_power(prime_, exponent);
}

AffineElement ScenarioGenerator::translation() {
  std::vector<AffineCell> cells;
  int n = static_cast<int>(rng_.between(1, 2));
  for (int i = 0; i < n; ++i) {
    Ball b = ball();
    bool overlaps = std::any_of(cells.begin(), cells.end(), [&](const AffineCell& c) { return intersect(c.region, Region(b)); });
    if (overlaps) continue;
    cells.push_back(AffineCell{Region(b), Coeffs{1, shift_within(b.level())}});
  }
  return AffineElement::from_cells(prime_, cells);
}

AffineElement ScenarioGenerator::swap() {
  Ball outer = ball(window_level_ - depth_ + 1, window_level_);
  Ball first = ball_inside(outer);
  Ball second = first;
  for (int tries = 0; tries < 64 && second == first; ++tries) {
    second = Ball(sample_uniform(Region(outer), first.level(), rng_), first.level(), prime_);
  }
  if (second == first) return translation();
  Rational d = second.center() - first.center();
  std::vector<AffineCell> cells{AffineCell{Region(first), Coeffs{1, d}}, AffineCell{Region(second), Coeffs{1, -d}}};
  return AffineElement::from_cells(prime_, cells);
}

AffineElement ScenarioGenerator::unit_scaling() {
  Ball b = ball();
  Rational a = unit();
  // x -> c + (x - c) / a keeps B(c, k) in place.
  Rational shift = a * b.center() - b.center();
  if (rng_.coin(0.5)) shift += a * shift_within(b.level());
  std::vector<AffineCell> cells{AffineCell{Region(b), Coeffs{a, shift}}};
  return AffineElement::from_cells(prime_, cells);
}

AffineElement ScenarioGenerator::non_bijective() {
  Ball b = ball();
  std::vector<AffineCell> cells;
  switch (rng_.below(3)) {
    case 0: {  // scale by p^{+-1}: the image has a different size
      Rational a = unit() * prime_power(prime_, rng_.coin(0.5) ? 1 : -1);
      Rational shift = rng_.coin(0.5) ? Rational(0) : Rational(a * b.center() - b.center());
      cells.push_back(AffineCell{Region(b), Coeffs{a, shift}});
      break;
    }
    case 1: {  // translation that leaves the ball
      Rational h = unit() * prime_power(prime_, -b.level() - 1);
      cells.push_back(AffineCell{Region(b), Coeffs{1, h}});
      break;
    }
    default: {  // collapse two cells onto one image
      Ball outer = b.level() < window_level_ ? b.parent() : b;
      Ball first = ball_inside(outer);
      Ball second = Ball(sample_uniform(Region(outer), first.level(), rng_), first.level(), prime_);
      if (second == first) {
        cells.push_back(AffineCell{Region(first), Coeffs{prime_power(prime_, 1), 0}});
      } else {
        cells.push_back(AffineCell{Region(first), Coeffs{1, Rational(second.center() - first.center())}});
      }
      break;
    }
  }
  return AffineElement::from_cells(prime_, cells);
}

AffineElement ScenarioGenerator::element(ElementKind kind) {
  switch (kind) {
    case ElementKind::translation: return translation();
    case ElementKind::swap: return swap();
    case ElementKind::unit_scaling: return unit_scaling();
    case ElementKind::non_bijective: return non_bijective();
    case ElementKind::composite: {
      auto first = bijective();
      auto second = rng_.coin(0.5) ? unit_scaling() : translation();
      return product_motion(second, first);
    }
  }
  return AffineElement::identity(prime_);
}

AffineElement ScenarioGenerator::bijective() {
  switch (rng_.below(3)) {
    case 0: return translation();
    case 1: return swap();
    default: return unit_scaling();
  }
}

AffineElement ScenarioGenerator::stratified(std::size_t i) {
  static constexpr ElementKind kinds[] = {ElementKind::translation, ElementKind::swap, ElementKind::unit_scaling,
                                          ElementKind::non_bijective, ElementKind::composite};
  return element(kinds[i % std::size(kinds)]);
}

}  // namespace afflab
