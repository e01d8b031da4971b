#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include "afflab/poisson.hpp"

namespace afflab {

/// A Monte Carlo run is split into a fixed number of lanes, each with its own
/// substream. Lane results are merged in lane order, so the estimate depends
/// only on (samples, seed, lanes) and never on the thread count.
struct McPlan {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t lanes = 16;
};

struct McEstimate {
  std::complex<double> mean;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  /// |mean - target| <= sigmas * stderr, with a small floor for zero-variance estimators.
  bool covers(std::complex<double> target, double sigmas = 4.0) const;
};

/// Workers for `lanes` lanes: AFFLAB_THREADS if set, else the hardware
/// concurrency, capped by the lane count. Throws std::invalid_argument on a
/// malformed AFFLAB_THREADS.
std::size_t worker_threads(std::size_t lanes);

using ConfigurationStatistic = std::function<std::complex<double>(const Configuration&)>;

/// Mean of statistic(gamma) over plan.samples Poisson configurations on the window.
McEstimate estimate(const WindowSpec& window, long resolution, const McPlan& plan,
                    const ConfigurationStatistic& statistic);

}  // namespace afflab
