#pragma once

#include <string_view>
#include <vector>

#include "afflab/affine.hpp"
#include "afflab/random.hpp"
#include "afflab/region.hpp"
#include "afflab/step_function.hpp"

namespace afflab {

enum class ElementKind { translation, swap, unit_scaling, non_bijective, composite };

std::string_view to_string(ElementKind kind);

/// Seeded source of random balls, step functions, marks and group elements,
/// all living inside the window B(0, window_level).
class ScenarioGenerator {
 public:
  ScenarioGenerator(Prime p, RandomStream rng, long window_level = 1, long depth = 3);

  Prime prime() const noexcept { return prime_; }
  long window_level() const noexcept { return window_level_; }
  RandomStream& rng() noexcept { return rng_; }

  /// Random ball inside the window with level in [min_level, max_level].
  Ball ball(long min_level, long max_level);
  Ball ball() { return ball(window_level_ - depth_, window_level_ - 1); }
  /// Random ball inside `outer` strictly finer than it (bounded by the generator depth).
  Ball ball_inside(const Ball& outer);

  Rational value();
  /// Non-negative value for multiplicative marks.
  Rational mark_value();

  /// Default 0, up to max_pieces (possibly nested) pieces.
  StepFunction step(int max_pieces = 4);
  /// Default 0, support inside `where`.
  StepFunction step_inside(const Ball& where, int max_pieces = 3);
  /// Default 1, non-negative values.
  StepFunction mark(int max_pieces = 3);
  StepFunction mark_inside(const Ball& where, int max_pieces = 3);

  AffineElement element(ElementKind kind);
  /// Uniform over the bijective kinds.
  AffineElement bijective();
  /// Stratified draw: index i cycles through all kinds.
  AffineElement stratified(std::size_t i);

  Rational unit();

 private:
  Rational shift_within(long level);
  AffineElement translation();
  AffineElement swap();
  AffineElement unit_scaling();
  AffineElement non_bijective();

  Prime prime_;
  RandomStream rng_;
  long window_level_;
  long depth_;
};

}  // namespace afflab
