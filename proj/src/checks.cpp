#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "afflab/errors.hpp"
#include "afflab/json_io.hpp"
#include "afflab/lab.hpp"

namespace afflab {

namespace {

using nlohmann::ordered_json;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void settle(CheckRecord& r, bool documented) {
  if (r.certificate_holds()) r.outcome = Outcome::pass;
  else r.outcome = documented ? Outcome::documented_fail : Outcome::fail;
}

CheckRecord exact_record(std::string id, const ordered_json& inputs, Rational lhs, Rational rhs) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.inputs_digest = fnv1a_digest(inputs.dump());
  r.kind = CheckKind::exact;
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  return r;
}

CheckRecord mc_record(std::string id, const ordered_json& inputs, const McEstimate& est, double target) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.inputs_digest = fnv1a_digest(inputs.dump());
  r.kind = CheckKind::monte_carlo;
  r.mean = est.mean.real();
  r.target = target;
  r.std_error = est.std_error;
  r.n = est.n;
  r.seed = est.seed;
  return r;
}

StepFunction minus_one(const StepFunction& phi) { return phi - constant(phi.prime(), 1); }

// g = (1, h 1_B): the ball B (absent for the identity) and the shift h.
struct Shift {
  std::optional<Region> ball;
  Rational h{0};
};

Shift as_shift(const AffineElement& g) {
  if (g.is_identity()) return {};
  auto cells = g.cells();
  if (cells.size() != 1 || cells[0].coeffs.a != 1 || !cells[0].region.is_ball()) {
    throw std::invalid_argument("expected an element (1, h 1_B) on a single ball");
  }
  return Shift{cells[0].region, cells[0].coeffs.b};
}

RegionSet translate(const RegionSet& set, const Rational& h) {
  std::vector<Region> parts;
  for (const auto& part : set.parts()) parts.push_back(affine_image(part, 1, h));
  return RegionSet(std::move(parts));
}

std::vector<Configuration> sample_gammas(const std::vector<ScenarioObject>& objects, std::size_t count,
                                         RandomStream& rng) {
  auto window = window_for(objects);
  long resolution = sampling_resolution(objects);
  std::vector<Configuration> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_configuration(window, resolution, rng));
  return out;
}

void append(std::vector<ScenarioObject>& into, const RepFunction& f) {
  for (auto& object : f.objects()) into.push_back(std::move(object));
}

ordered_json write_regions(const RegionSet& set) {
  ordered_json out = ordered_json::array();
  for (const auto& part : set.parts()) out.push_back(json::write(part));
  return out;
}

}  // namespace

CheckRecord check_change_of_variables(const AffineElement& g, const StepFunction& f) {
  Stopwatch clock;
  ordered_json inputs{{"element", json::write(g)}, {"f", json::write(f)}};
  auto r = exact_record("change_of_variables", inputs, integrate(pullback(f, g)),
                        integrate(f * pushforward_density(g)));
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_mass_defect(const AffineElement& g) {
  Stopwatch clock;
  auto r = exact_record("mass_defect", ordered_json{{"element", json::write(g)}}, mass_defect(g), Rational(0));
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_pushforward_lemma(const AffineElement& g, const StepFunction& phi) {
  Stopwatch clock;
  ordered_json inputs{{"element", json::write(g)}, {"phi", json::write(phi)}};
  auto r = exact_record("pushforward_lemma", inputs, laplace_exact(pullback(phi, g)).exponent,
                        laplace_exact_wrt(phi, pushforward_density(g)).exponent);
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_pushforward_lemma_mc(const AffineElement& g, const StepFunction& phi, const McPlan& plan) {
  Stopwatch clock;
  StepFunction gphi = pullback(phi, g);
  std::vector<ScenarioObject> objects{phi, gphi, g};
  auto window = window_for(objects);
  long resolution = sampling_resolution(objects);
  std::atomic<long> mismatches{0};
  auto est = estimate(window, resolution, plan, [&](const Configuration& gamma) {
    Rational moved = multiplicative_value(gphi, gamma);
    if (moved != multiplicative_value(phi, push_configuration(g, gamma))) mismatches.fetch_add(1);
    return std::complex<double>(moved.get_d());
  });
  Rational exponent = laplace_exact_wrt(phi, pushforward_density(g)).exponent;
  ordered_json inputs{{"element", json::write(g)}, {"phi", json::write(phi)}, {"samples", plan.samples}};
  auto r = mc_record("pushforward_lemma_mc", inputs, est, std::exp(exponent.get_d()));
  r.extra.push_back({"paired_mismatches", Rational(mismatches.load()), Rational(0)});
  r.witness = ordered_json{{"exponent", to_string(exponent)}};
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_support_shift(const AffineElement& g, const RegionSet& lambda, const StepFunction& f) {
  Stopwatch clock;
  Shift shift = as_shift(g);
  if (shift.ball && !lambda.subset_of(RegionSet(*shift.ball))) {
    throw std::invalid_argument("support shift: Lambda must lie inside B");
  }
  if (!f.support().subset_of(lambda)) throw std::invalid_argument("support shift: f must be supported in Lambda");
  RegionSet target = translate(lambda, -shift.h);
  RegionSet outside = pullback(f, g).support().minus(target);
  ordered_json inputs{{"element", json::write(g)}, {"lambda", write_regions(lambda)}, {"f", json::write(f)}};
  auto r = exact_record("support_shift", inputs, outside.measure(), Rational(0));
  r.witness = ordered_json{{"shift", to_string(shift.h)}, {"target", write_regions(target)}};
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_invariance(const AffineElement& g, const RegionSet& lambda, const StepFunction& phi,
                             HypothesisMode mode) {
  Stopwatch clock;
  Shift shift = as_shift(g);
  bool clear_of_image = true, clear_of_ball = true;
  if (shift.ball) {
    clear_of_image = lambda.disjoint_from(RegionSet(affine_image(*shift.ball, 1, shift.h)));
    clear_of_ball = lambda.disjoint_from(RegionSet(*shift.ball));
  }
  if (!clear_of_image) throw std::invalid_argument("invariance: Lambda meets B + h");
  if (mode == HypothesisMode::strengthened && !clear_of_ball) {
    throw std::invalid_argument("invariance: strengthened hypothesis needs Lambda clear of B");
  }
  if (!minus_one(phi).support().subset_of(lambda)) {
    throw std::invalid_argument("invariance: phi - 1 must be supported in Lambda");
  }
  ordered_json inputs{{"element", json::write(g)},
                      {"lambda", write_regions(lambda)},
                      {"phi", json::write(phi)},
                      {"hypothesis", to_string(mode)}};
  auto r = exact_record(std::string("invariance_") + std::string(to_string(mode)), inputs,
                        laplace_exact(pullback(phi, g)).exponent, laplace_exact(phi).exponent);
  r.witness = ordered_json{{"hypothesis", to_string(mode)},
                           {"lambda_clear_of_B_plus_h", clear_of_image},
                           {"lambda_clear_of_B", clear_of_ball}};
  // Under the literal reading, Lambda inside B is allowed and the identity can fail.
  settle(r, mode == HypothesisMode::literal && !clear_of_ball);
  r.runtime_seconds = clock.seconds();
  return r;
}

Separator find_separator(const RegionSet& lambda1, const RegionSet& lambda2, Prime p) {
  RegionSet both = lambda1.unite(lambda2);
  Ball hull = both.hull().value_or(Ball(Rational(0), 0, p));
  if (hull.prime() != p) throw PrimeMismatch("find_separator: regions over a different prime");
  long shift_level = hull.level() + 1;
  long level = shift_level;
  if (auto v = valuation(hull.center(), p)) level = std::max(level, -*v);
  Ball ball(Rational(0), level, p);
  // |h| = p^{hull level + 1}: moves every point of the hull out of it, but not out of B.
  Rational h = prime_power(p, -shift_level);
  return Separator{AffineElement::translation(Region(ball), h), ball, h};
}

bool separator_certified(const Separator& s, const RegionSet& lambda1, const RegionSet& lambda2) {
  RegionSet ball{Region(s.ball)};
  RegionSet moved = translate(lambda2, -s.shift);
  return lambda2.subset_of(ball) && moved.subset_of(ball) && moved.disjoint_from(lambda1.unite(lambda2)) &&
         is_bijective(s.element).verdict;
}

CheckRecord check_factorization(const StepFunction& phi1, const StepFunction& phi2) {
  Stopwatch clock;
  if (phi1.prime() != phi2.prime()) throw PrimeMismatch("factorization: marks over different primes");
  RegionSet lambda1 = minus_one(phi1).support();
  RegionSet lambda2 = minus_one(phi2).support();
  Separator sep = find_separator(lambda1, lambda2, phi1.prime());
  StepFunction moved = pullback(phi2, sep.element);
  Rational e1 = laplace_exact(phi1).exponent;
  Rational e2 = laplace_exact(phi2).exponent;
  ordered_json inputs{{"phi1", json::write(phi1)}, {"phi2", json::write(phi2)}};
  auto r = exact_record("factorization", inputs, laplace_exact(phi1 * moved).exponent, e1 + e2);
  r.extra.push_back({"invariance", laplace_exact(moved).exponent, e2});
  bool certified = separator_certified(sep, lambda1, lambda2);
  r.extra.push_back({"separator_certified", Rational(certified ? 1 : 0), Rational(1)});
  // Ergodicity probe: E[F1 V_g F2] >= 1/2 E[F1] E[F2].
  bool probe = r.lhs->get_d() >= r.rhs->get_d() - std::log(2.0);
  r.extra.push_back({"ergodicity_probe", Rational(probe ? 1 : 0), Rational(1)});
  r.witness = ordered_json{{"separator", json::write(sep.element)},
                           {"ball", json::write(sep.ball)},
                           {"shift", to_string(sep.shift)}};
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_isometry(const AffineElement& g, const StepFunction& phi) {
  Stopwatch clock;
  bool bijective = is_bijective(g).verdict;
  InverseMode mode = bijective ? InverseMode::motion : InverseMode::pointwise;
  auto f = RepFunction::multiplicative(phi);
  auto u = apply_U(g, f, mode);
  ordered_json inputs{{"element", json::write(g)}, {"phi", json::write(phi)}};
  auto r = exact_record("isometry", inputs, *inner_product(u, u, InnerProductMode::exact).exponent,
                        *inner_product(f, f, InnerProductMode::exact).exponent);
  r.inverse_mode = mode;
  r.witness = ordered_json{{"bijective", bijective}};
  settle(r, !bijective);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_isometry_mc(const AffineElement& g, const StepFunction& phi, const McPlan& plan) {
  Stopwatch clock;
  auto f = RepFunction::multiplicative(phi);
  auto u = apply_U(g, f, InverseMode::motion);
  std::vector<ScenarioObject> objects{g};
  append(objects, f);
  append(objects, u);
  auto est = estimate(window_for(objects), sampling_resolution(objects), plan, [&](const Configuration& gamma) {
    return std::complex<double>(squared_value(u, gamma).value() - squared_value(f, gamma).value());
  });
  ordered_json inputs{{"element", json::write(g)}, {"phi", json::write(phi)}, {"samples", plan.samples}};
  auto r = mc_record("isometry_mc", inputs, est, 0.0);
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

namespace {

AffineElement product(ProductMode mode, const AffineElement& outer, const AffineElement& inner) {
  return mode == ProductMode::motion ? product_motion(outer, inner) : product_pointwise(outer, inner);
}

}  // namespace

CheckRecord check_composition(const AffineElement& g, const AffineElement& h, const RepFunction& f,
                              std::span<const Configuration> gammas, ProductMode mode, CompositionOrder order) {
  Stopwatch clock;
  AffineElement composite = order == CompositionOrder::gh ? product(mode, g, h) : product(mode, h, g);
  RepFunction left = apply_V(h, apply_V(g, f));
  RepFunction right = apply_V(composite, f);
  long agree = 0;
  ordered_json first_mismatch;
  for (const auto& gamma : gammas) {
    auto a = evaluate_exact(left, gamma);
    auto b = evaluate_exact(right, gamma);
    if (a == b) {
      ++agree;
    } else if (first_mismatch.is_null()) {
      first_mismatch = ordered_json{{"gamma", json::write(gamma)}, {"left", json::write(a)}, {"right", json::write(b)}};
    }
  }
  ordered_json inputs{{"g", json::write(g)}, {"h", json::write(h)}, {"f", json::write(f)}};
  auto r = exact_record(std::string("composition_") + std::string(to_string(mode)) + "_" +
                            std::string(to_string(order)),
                        inputs, Rational(agree), Rational(static_cast<long>(gammas.size())));
  r.product_mode = mode;
  r.witness = ordered_json{{"order", to_string(order)}};
  if (!first_mismatch.is_null()) r.witness["mismatch"] = first_mismatch;
  // Only the motion product in the order g.h is expected to compose.
  settle(r, !(mode == ProductMode::motion && order == CompositionOrder::gh));
  r.runtime_seconds = clock.seconds();
  return r;
}

std::vector<CheckRecord> check_composition_all(const AffineElement& g, const AffineElement& h, const RepFunction& f,
                                               std::size_t samples, RandomStream& rng) {
  std::vector<ScenarioObject> objects{g, h};
  append(objects, f);
  append(objects, apply_V(h, apply_V(g, f)));
  for (auto mode : {ProductMode::motion, ProductMode::pointwise}) {
    for (const auto& composite : {product(mode, g, h), product(mode, h, g)}) {
      objects.emplace_back(composite);
      append(objects, apply_V(composite, f));
    }
  }
  auto gammas = sample_gammas(objects, samples, rng);
  std::vector<CheckRecord> out;
  for (auto mode : {ProductMode::motion, ProductMode::pointwise}) {
    for (auto order : {CompositionOrder::gh, CompositionOrder::hg}) {
      out.push_back(check_composition(g, h, f, gammas, mode, order));
      out.back().seed = rng.seed();
    }
  }
  return out;
}

CheckRecord check_u_composition(const AffineElement& g1, const AffineElement& g2, const RepFunction& f,
                                std::span<const Configuration> gammas) {
  Stopwatch clock;
  if (!is_bijective(g1).verdict || !is_bijective(g2).verdict) {
    throw NonBijectiveElement("U composition needs bijective elements");
  }
  RepFunction twice = apply_U(g2, apply_U(g1, f));
  RepFunction composed = apply_U(product_motion(g1, g2), f);
  RepFunction literal = apply_U(product_motion(g2, g1), f);
  long agree = 0, literal_agree = 0;
  for (const auto& gamma : gammas) {
    auto lhs = squared_value(twice, gamma);
    if (lhs == squared_value(composed, gamma)) ++agree;
    if (lhs == squared_value(literal, gamma)) ++literal_agree;
  }
  ordered_json inputs{{"g1", json::write(g1)}, {"g2", json::write(g2)}, {"f", json::write(f)}};
  auto r = exact_record("u_composition", inputs, Rational(agree), Rational(static_cast<long>(gammas.size())));
  r.witness = ordered_json{{"literal_order_agreements", literal_agree}, {"configurations", gammas.size()}};
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_rn_normalization(const AffineElement& g) {
  Stopwatch clock;
  Prime p = g.prime();
  RepFunction r_functional(p, GaussianRational(1), mass_defect(g), pushforward_density(g), constant(p, 1), {},
                           Psi::constant(0, GaussianRational(1)));
  auto e = expectation_exact(r_functional);
  auto r = exact_record("rn_normalization", ordered_json{{"element", json::write(g)}}, *e.exponent, Rational(0));
  r.extra.push_back({"coefficient", e.coefficient->re, Rational(1)});
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

CheckRecord check_rn_normalization_mc(const AffineElement& g, const McPlan& plan) {
  Stopwatch clock;
  StepFunction rho = pushforward_density(g);
  double prefactor = std::exp(mass_defect(g).get_d());
  std::vector<ScenarioObject> objects{rho, g};
  auto est = estimate(window_for(objects), sampling_resolution(objects), plan, [&](const Configuration& gamma) {
    return std::complex<double>(multiplicative_value(rho, gamma).get_d() * prefactor);
  });
  ordered_json inputs{{"element", json::write(g)}, {"samples", plan.samples}};
  auto r = mc_record("rn_normalization_mc", inputs, est, 1.0);
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

std::vector<CheckRecord> check_sampler(const Ball& window, const StepFunction& f, const McPlan& plan) {
  if (!f.support().subset_of(RegionSet(Region(window)))) {
    throw std::invalid_argument("sampler check: f must live inside the window");
  }
  WindowSpec spec = make_window({Region(window)});
  long resolution = window.level() - 2;
  if (auto fine = f.finest_level()) resolution = std::min(resolution, *fine - 2);
  std::vector<Ball> cells = split(window);
  ordered_json base{{"window", json::write(window)}, {"samples", plan.samples}};
  std::vector<CheckRecord> out;

  auto run = [&](std::string id, ordered_json inputs, double target, auto statistic) {
    Stopwatch clock;
    auto est = estimate(spec, resolution, plan, [&](const Configuration& gamma) {
      return std::complex<double>(statistic(gamma));
    });
    auto r = mc_record(std::move(id), inputs, est, target);
    settle(r, false);
    r.runtime_seconds = clock.seconds();
    out.push_back(std::move(r));
  };

  auto count_in = [](const Ball& b, const Configuration& gamma) {
    double n = 0;
    for (const auto& x : gamma.points()) n += b.contains(x) ? 1 : 0;
    return n;
  };
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ordered_json inputs = base;
    inputs["cell"] = json::write(cells[i]);
    run("sampler_cell_" + std::to_string(i), inputs, cells[i].measure().get_d(),
        [&, i](const Configuration& gamma) { return count_in(cells[i], gamma); });
  }
  ordered_json pair_inputs = base;
  pair_inputs["a"] = json::write(cells[0]);
  pair_inputs["b"] = json::write(cells[1]);
  run("sampler_pair", pair_inputs, Rational(cells[0].measure() * cells[1].measure()).get_d(),
      [&](const Configuration& gamma) { return count_in(cells[0], gamma) * count_in(cells[1], gamma); });
  ordered_json campbell_inputs = base;
  campbell_inputs["f"] = json::write(f);
  run("sampler_campbell", campbell_inputs, integrate(f).get_d(),
      [&](const Configuration& gamma) { return pairing(f, gamma).get_d(); });
  return out;
}

CheckRecord check_independence(const StepFunction& phi1, const StepFunction& phi2) {
  Stopwatch clock;
  if (!minus_one(phi1).support().disjoint_from(minus_one(phi2).support())) {
    throw std::invalid_argument("independence: marks must differ from 1 on disjoint sets");
  }
  ordered_json inputs{{"phi1", json::write(phi1)}, {"phi2", json::write(phi2)}};
  auto r = exact_record("independence", inputs, laplace_exact(phi1 * phi2).exponent,
                        laplace_exact(phi1).exponent + laplace_exact(phi2).exponent);
  settle(r, false);
  r.runtime_seconds = clock.seconds();
  return r;
}

}  // namespace afflab
