#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "afflab/affine.hpp"
#include "afflab/random.hpp"
#include "afflab/rational.hpp"
#include "afflab/region.hpp"
#include "afflab/step_function.hpp"

namespace afflab {

/// Finite multiset of points (kept sorted), the window it was drawn in, and
/// the ball level below which the points carry no information.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<Rational> points, RegionSet window = {},
                         std::optional<long> resolution = std::nullopt);

  const std::vector<Rational>& points() const noexcept { return points_; }
  const RegionSet& window() const noexcept { return window_; }
  std::optional<long> resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return points_.size(); }

  /// Throws ResolutionError if a query at `level` cannot be answered exactly.
  void require_resolution(std::optional<long> level) const;

  friend bool operator==(const Configuration& l, const Configuration& r) { return l.points_ == r.points_; }

 private:
  std::vector<Rational> points_;
  RegionSet window_;
  std::optional<long> resolution_;
};

struct WindowSpec {
  std::vector<Region> regions;
  Rational total_mass;
};

/// Regions must be disjoint with positive total mass.
WindowSpec make_window(std::vector<Region> regions);

using ScenarioObject = std::variant<StepFunction, AffineElement>;

/// Smallest ball B(0, K) containing every support, moved cell and image cell.
/// Throws EmptyScenario for an empty list.
WindowSpec window_for(std::span<const ScenarioObject> objects);

/// Sampling level for a scenario: two guard digits below the finest level in
/// play, lowered further by the digits each listed element can destroy when a
/// configuration is pushed through it (plus `extra_digits`).
long sampling_resolution(std::span<const ScenarioObject> objects, long extra_digits = 0);

/// Poisson(lambda) by inverse CDF; lambda is the only float on the sampling path.
unsigned long sample_poisson_count(double lambda, RandomStream& rng);

Configuration sample_configuration(const WindowSpec& window, long resolution, RandomStream& rng);

/// <f, gamma> with multiplicity; f must have default 0.
Rational pairing(const StepFunction& f, const Configuration& gamma);

/// Image multiset {g x : x in gamma}.
Configuration push_configuration(const AffineElement& g, const Configuration& gamma);

/// Product over the configuration of a multiplicative mark.
Rational multiplicative_value(const StepFunction& phi, const Configuration& gamma);

struct LaplaceResult {
  Rational exponent;
  double value;
};

/// E_{pi_m}[prod phi(x)] = exp(integral of (phi - 1)). phi >= 0 with default 1.
LaplaceResult laplace_exact(const StepFunction& phi);

/// Same expectation under the Poisson measure with intensity rho m.
LaplaceResult laplace_exact_wrt(const StepFunction& phi, const StepFunction& rho);

}  // namespace afflab
