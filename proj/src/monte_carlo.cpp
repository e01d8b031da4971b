#include "afflab/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace afflab {

bool McEstimate::covers(std::complex<double> target, double sigmas) const {
  double slack = sigmas * std_error + 1e-12 * (1.0 + std::abs(target));
  return std::abs(mean - target) <= slack;
}

std::size_t worker_threads(std::size_t lanes) {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AFFLAB_THREADS"); env && *env) {
    std::string_view text(env);
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || value == 0) {
      throw std::invalid_argument("AFFLAB_THREADS must be a positive integer, got '" + std::string(text) + "'");
    }
    cap = value;
  }
  return std::max<std::size_t>(1, std::min(cap, lanes));
}

namespace {

struct LaneSums {
  std::complex<double> sum;
  double sum_sq = 0.0;
  std::uint64_t n = 0;
};

}  // namespace

McEstimate estimate(const WindowSpec& window, long resolution, const McPlan& plan,
                    const ConfigurationStatistic& statistic) {
  if (plan.lanes == 0) throw std::invalid_argument("estimate: at least one lane is required");
  if (plan.samples == 0) throw std::invalid_argument("estimate: at least one sample is required");
  const std::size_t lanes = plan.lanes;
  std::vector<LaneSums> sums(lanes);

  auto run_lane = [&](std::size_t lane) {
    std::uint64_t quota = plan.samples / lanes + (lane < plan.samples % lanes ? 1 : 0);
    RandomStream rng(plan.seed, lane);
    LaneSums& out = sums[lane];
    for (std::uint64_t i = 0; i < quota; ++i) {
      std::complex<double> x = statistic(sample_configuration(window, resolution, rng));
      out.sum += x;
      out.sum_sq += std::norm(x);
    }
    out.n = quota;
  };

  std::size_t workers = worker_threads(lanes);
  if (workers == 1) {
    for (std::size_t lane = 0; lane < lanes; ++lane) run_lane(lane);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t lane; (lane = next.fetch_add(1)) < lanes;) {
          try {
            run_lane(lane);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  LaneSums total;
  for (const auto& s : sums) {
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
    total.n += s.n;
  }
  const double n = static_cast<double>(total.n);
  McEstimate result;
  result.mean = total.sum / n;
  double variance = std::max(0.0, total.sum_sq / n - std::norm(result.mean));
  result.std_error = total.n > 1 ? std::sqrt(variance / (n - 1)) : 0.0;
  result.n = total.n;
  result.seed = plan.seed;
  return result;
}

}  // namespace afflab
