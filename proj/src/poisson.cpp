#include "afflab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "afflab/errors.hpp"

namespace afflab {

namespace {

constexpr long kGuardDigits = 2;

// Level K of the smallest B(0, K) containing the ball.
long zero_ball_level(const Ball& ball) {
  long level = ball.level();
  if (auto v = valuation(ball.center(), ball.prime())) level = std::max(level, -*v);
  return level;
}

template <class Visit>
void for_each_region(const ScenarioObject& object, Visit visit) {
  if (const auto* f = std::get_if<StepFunction>(&object)) {
    for (const auto& piece : f->pieces()) visit(piece.region);
  } else {
    const auto& g = std::get<AffineElement>(object);
    for (const auto& cell : g.cells()) {
      visit(cell.region);
      visit(affine_image(cell.region, cell.coeffs.a, cell.coeffs.b));
    }
  }
}

Prime prime_of(const ScenarioObject& object) {
  return std::visit([](const auto& o) { return o.prime(); }, object);
}

}  // namespace

Configuration::Configuration(std::vector<Rational> points, RegionSet window, std::optional<long> resolution)
    : points_(std::move(points)), window_(std::move(window)), resolution_(resolution) {
  std::sort(points_.begin(), points_.end());
}

void Configuration::require_resolution(std::optional<long> level) const {
  if (resolution_ && level && *level < *resolution_) {
    throw ResolutionError("membership query at level " + std::to_string(*level) +
                          " below sampled resolution " + std::to_string(*resolution_));
  }
}

WindowSpec make_window(std::vector<Region> regions) {
  RegionSet check(regions);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      if (intersect(regions[i], regions[j])) throw std::invalid_argument("window regions overlap");
    }
  }
  Rational mass = check.measure();
  if (sgn(mass) <= 0) throw std::invalid_argument("window has no mass");
  return WindowSpec{std::move(regions), mass};
}

WindowSpec window_for(std::span<const ScenarioObject> objects) {
  if (objects.empty()) throw EmptyScenario("window_for: nothing to cover");
  const Prime p = prime_of(objects.front());
  std::optional<long> level;
  for (const auto& object : objects) {
    if (prime_of(object) != p) throw PrimeMismatch("window_for: objects over different primes");
    for_each_region(object, [&](const Region& r) {
      long l = zero_ball_level(r.base());
      level = level ? std::max(*level, l) : l;
    });
  }
  // Nothing non-trivial: the unit ball is as good a window as any.
  Ball ball(Rational(0), level.value_or(0), p);
  return make_window({Region(ball)});
}

long sampling_resolution(std::span<const ScenarioObject> objects, long extra_digits) {
  std::optional<long> finest;
  long lost = 0;
  for (const auto& object : objects) {
    for_each_region(object, [&](const Region& r) {
      finest = finest ? std::min(*finest, r.finest_level()) : r.finest_level();
    });
    if (const auto* g = std::get_if<AffineElement>(&object)) lost += g->max_scale_valuation();
  }
  if (!finest) {
    if (objects.empty()) throw EmptyScenario("sampling_resolution: nothing in scenario");
    finest = window_for(objects).regions.front().finest_level();
  }
  return *finest - kGuardDigits - lost - extra_digits;
}

unsigned long sample_poisson_count(double lambda, RandomStream& rng) {
  if (!(lambda >= 0.0) || lambda > 600.0) {
    throw std::domain_error("sample_poisson_count: mean out of range: " + std::to_string(lambda));
  }
  double u = rng.uniform01();
  double pmf = std::exp(-lambda);
  double cdf = pmf;
  unsigned long k = 0;
  while (u >= cdf && pmf > 0.0) {
    ++k;
    pmf *= lambda / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

Configuration sample_configuration(const WindowSpec& window, long resolution, RandomStream& rng) {
  const double total = window.total_mass.get_d();
  auto count = sample_poisson_count(total, rng);
  std::vector<Rational> points;
  points.reserve(count);
  for (unsigned long i = 0; i < count; ++i) {
    std::size_t chosen = 0;
    if (window.regions.size() > 1) {
      double u = rng.uniform01() * total;
      double acc = 0.0;
      chosen = window.regions.size() - 1;
      for (std::size_t r = 0; r < window.regions.size(); ++r) {
        acc += window.regions[r].measure().get_d();
        if (u < acc) {
          chosen = r;
          break;
        }
      }
    }
    points.push_back(sample_uniform(window.regions[chosen], resolution, rng));
  }
  return Configuration(std::move(points), RegionSet(window.regions), resolution);
}

Rational pairing(const StepFunction& f, const Configuration& gamma) {
  if (sgn(f.default_value()) != 0) throw std::domain_error("pairing: f must vanish off a bounded set");
  gamma.require_resolution(f.finest_level());
  Rational total = 0;
  for (const auto& x : gamma.points()) total += f.evaluate(x);
  return total;
}

Configuration push_configuration(const AffineElement& g, const Configuration& gamma) {
  std::vector<Rational> moved;
  moved.reserve(gamma.size());
  for (const auto& x : gamma.points()) moved.push_back(act_point(g, x));
  std::optional<long> resolution = gamma.resolution();
  if (resolution) *resolution += g.max_scale_valuation();
  return Configuration(std::move(moved), gamma.window(), resolution);
}

Rational multiplicative_value(const StepFunction& phi, const Configuration& gamma) {
  gamma.require_resolution(phi.finest_level());
  Rational product = 1;
  for (const auto& x : gamma.points()) {
    product *= phi.evaluate(x);
    if (sgn(product) == 0) break;
  }
  return product;
}

namespace {

void require_mark(const StepFunction& phi) {
  if (phi.default_value() != 1) throw std::domain_error("multiplicative mark must default to 1");
  for (const auto& piece : phi.pieces()) {
    if (sgn(piece.value) < 0) throw std::domain_error("multiplicative mark takes a negative value");
  }
}

}  // namespace

LaplaceResult laplace_exact(const StepFunction& phi) {
  require_mark(phi);
  Rational exponent = integrate(phi - constant(phi.prime(), 1));
  return {exponent, std::exp(exponent.get_d())};
}

LaplaceResult laplace_exact_wrt(const StepFunction& phi, const StepFunction& rho) {
  require_mark(phi);
  Rational exponent = integrate((phi - constant(phi.prime(), 1)) * rho);
  return {exponent, std::exp(exponent.get_d())};
}

}  // namespace afflab
