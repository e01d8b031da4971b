#pragma once

#include <cstdint>
#include <random>

#include "afflab/rational.hpp"
#include "afflab/region.hpp"

namespace afflab {

/// Deterministic random stream keyed by (seed, lane). Distinct lanes give
/// independent substreams; nothing is shared between streams.
///
/// Draws are built from raw 64-bit engine output only, so sequences are the
/// same on every standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t lane = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t lane() const noexcept { return lane_; }

  /// Child stream for a sub-task; deterministic in (seed, lane, index).
  RandomStream split(std::uint64_t index) const;

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  long between(long lo, long hi);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  bool coin(double probability_true) { return uniform01() < probability_true; }

 private:
  std::uint64_t seed_;
  std::uint64_t lane_;
  std::mt19937_64 engine_;
};

/// Haar-uniform point of the region, known down to balls of level `resolution`
/// (the point is the truncated representative of a uniform level-`resolution`
/// sub-ball). Exclusions are handled by exact rejection.
/// Throws ResolutionError when the region has structure finer than `resolution`.
Rational sample_uniform(const Region& region, long resolution, RandomStream& rng);

}  // namespace afflab
