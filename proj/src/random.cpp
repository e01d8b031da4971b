#include "afflab/random.hpp"

#include <limits>
#include <string>

#include "afflab/errors.hpp"

namespace afflab {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(lane >> 32), 0x61666666u};
  return std::mt19937_64(seq);
}

// splitmix64 finalizer; mixes (lane, index) into a fresh lane id.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t lane)
    : seed_(seed), lane_(lane), engine_(seeded_engine(seed, lane)) {}

RandomStream RandomStream::split(std::uint64_t index) const { return RandomStream(seed_, mix(lane_ ^ mix(index))); }

std::uint64_t RandomStream::below(std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

long RandomStream::between(long lo, long hi) {
  return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double RandomStream::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Rational sample_uniform(const Region& region, long resolution, RandomStream& rng) {
  if (region.finest_level() < resolution) {
    throw ResolutionError("region has level " + std::to_string(region.finest_level()) +
                          " structure below sampling resolution " + std::to_string(resolution));
  }
  const Ball& base = region.base();
  const auto p = base.prime();
  const long digits = base.level() - resolution;
  while (true) {
    Integer offset = 0;
    for (long i = 0; i < digits; ++i) {
      offset *= p.value();
      offset += static_cast<unsigned long>(rng.below(p.uvalue()));
    }
    Rational x = base.center() + Rational(offset) * prime_power(p, -base.level());
    if (region.contains(x)) return x;
  }
}

}  // namespace afflab
