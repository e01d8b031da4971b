#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "afflab/errors.hpp"
#include "afflab/json_io.hpp"
#include "afflab/lab.hpp"

namespace afflab {

namespace {

using nlohmann::ordered_json;

const char* const kSuites[] = {"core", "poisson", "representation", "ergodicity"};
constexpr long kAllowedPrimes[] = {2, 3, 5, 7};
constexpr double kTailProbability4Sigma = 6.334e-5;

const char* const kRequiredEntries[] = {"registry.v_composition_pointwise", "registry.invariance_literal",
                                        "registry.isometry_non_bijective"};

ElementKind kind_from_name(const std::string& name) {
  for (auto kind : {ElementKind::translation, ElementKind::swap, ElementKind::unit_scaling,
                    ElementKind::non_bijective, ElementKind::composite}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown element kind '" + name + "'");
}

Region ball_region(const char* center, long level) { return Region(Ball(parse_rational(center), level, Prime(3))); }

}  // namespace

std::vector<CheckRecord> counterexample_registry() {
  const Prime p(3);
  std::vector<CheckRecord> out;

  {
    // V_h V_g against the coefficient-wise product: 1 -> 2 -> 3 under the point
    // maps, but 1 + b_g(1) + b_h(1) = 2.
    auto g = AffineElement::translation(ball_region("2", -1), 1);
    auto h = AffineElement::translation(ball_region("1", -1), 1);
    auto f = RepFunction::cylinder({indicator(ball_region("0", -1))}, Psi::slot(1, 0));
    std::vector<Configuration> gammas{Configuration({0}), Configuration({1}), Configuration({2})};
    auto r = check_composition(g, h, f, gammas, ProductMode::pointwise, CompositionOrder::gh);
    r.check_id = "registry.v_composition_pointwise";
    r.witness["g"] = json::write(g);
    r.witness["h"] = json::write(h);
    r.witness["x"] = "1/1";
    r.witness["motion_image"] = to_string(act_point(g, act_point(h, 1)));
    r.witness["pointwise_image"] = to_string(act_point(product_pointwise(g, h), 1));
    out.push_back(std::move(r));
  }
  {
    // Lambda = B: the literal hypothesis Lambda ∩ (B + h) = ∅ holds, yet g moves all of Lambda away.
    auto lambda = ball_region("0", -1);
    auto g = AffineElement::translation(lambda, 5);
    auto phi = StepFunction::from_disjoint(p, {{lambda, Rational(2)}}, Rational(1));
    auto r = check_invariance(g, RegionSet(lambda), phi, HypothesisMode::literal);
    r.check_id = "registry.invariance_literal";
    out.push_back(std::move(r));
  }
  {
    auto g = AffineElement::translation(ball_region("0", -1), 5);
    auto phi = StepFunction::from_disjoint(p, {{ball_region("0", -1), Rational(2)}}, Rational(1));
    auto r = check_isometry(g, phi);
    r.check_id = "registry.isometry_non_bijective";
    r.witness["element"] = json::write(g);
    r.witness["phi"] = json::write(phi);
    out.push_back(std::move(r));
  }
  {
    auto g1 = AffineElement::translation(ball_region("0", 0), 1);
    auto g2 = AffineElement::translation(ball_region("1", -1), 1);
    CheckRecord r;
    r.check_id = "registry.product_divergence";
    ordered_json inputs{{"g1", json::write(g1)}, {"g2", json::write(g2)}, {"x", "0/1"}};
    r.inputs_digest = fnv1a_digest(inputs.dump());
    r.product_mode = ProductMode::pointwise;
    r.lhs = act_point(product_motion(g2, g1), 0);
    r.rhs = act_point(product_pointwise(g2, g1), 0);
    r.witness = inputs;
    r.outcome = r.certificate_holds() ? Outcome::pass : Outcome::documented_fail;
    out.push_back(std::move(r));
  }
  for (auto& r : out) r.runtime_seconds = 0.0;
  return out;
}

bool registry_complete(std::span<const CheckRecord> registry) {
  for (const char* id : kRequiredEntries) {
    auto it = std::find_if(registry.begin(), registry.end(), [&](const CheckRecord& r) { return r.check_id == id; });
    if (it == registry.end() || it->outcome != Outcome::documented_fail || !reverify(*it)) return false;
  }
  return true;
}

void LabConfig::validate() const {
  if (primes.empty()) throw std::invalid_argument("config: at least one prime is required");
  for (long p : primes) {
    if (std::find(std::begin(kAllowedPrimes), std::end(kAllowedPrimes), p) == std::end(kAllowedPrimes)) {
      throw std::invalid_argument("config: prime " + std::to_string(p) + " not in {2, 3, 5, 7}");
    }
  }
  if (samples < 1000) throw std::invalid_argument("config: samples must be at least 1000");
  if (cases == 0) throw std::invalid_argument("config: cases must be positive");
  if (lanes == 0) throw std::invalid_argument("config: lanes must be positive");
  if (suites.empty()) throw std::invalid_argument("config: no suite selected");
  for (const auto& s : suites) {
    bool known = s == "all" || std::find(std::begin(kSuites), std::end(kSuites), s) != std::end(kSuites);
    if (!known) throw std::invalid_argument("config: unknown suite '" + s + "'");
  }
  unsigned total = 0;
  for (const auto& [name, weight] : mix) {
    kind_from_name(name);
    total += weight;
  }
  if (total == 0) throw std::invalid_argument("config: element mix has no positive weight");
  if (out.empty()) throw std::invalid_argument("config: output path is empty");
}

LabConfig lab_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::set<std::string> known{"prime", "primes", "seed", "samples", "suites", "suite",
                                           "mix",   "out",    "cases", "lanes"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("config: unknown field '" + key + "'");
  }
  LabConfig c;
  try {
    if (j.contains("prime")) c.primes = {j["prime"].get<long>()};
    if (j.contains("primes")) c.primes = j["primes"].get<std::vector<long>>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) c.samples = j["samples"].get<std::uint64_t>();
    if (j.contains("suite")) c.suites = {j["suite"].get<std::string>()};
    if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
    if (j.contains("mix")) c.mix = j["mix"].get<std::map<std::string, unsigned>>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("cases")) c.cases = j["cases"].get<std::size_t>();
    if (j.contains("lanes")) c.lanes = j["lanes"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ordered_json to_json(const LabConfig& c) {
  ordered_json mix = ordered_json::object();
  for (const auto& [name, weight] : c.mix) mix[name] = weight;
  return ordered_json{{"primes", c.primes}, {"seed", c.seed},   {"samples", c.samples}, {"suites", c.suites},
                      {"mix", mix},         {"out", c.out},     {"cases", c.cases},     {"lanes", c.lanes}};
}

namespace {

using Task = std::function<std::vector<CheckRecord>()>;

struct NamedTask {
  std::string prefix;  // "<suite>." ; the check name and suffix are appended
  std::string suffix;  // ".p<prime>.<index>"
  std::uint64_t seed;
  Task run;
};

std::string index_suffix(long p, std::size_t i) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, ".p%ld.%04zu", p, i);
  return buffer;
}

class SuiteBuilder {
 public:
  SuiteBuilder(const LabConfig& config, std::map<std::string, std::size_t>& mix_counts)
      : config_(config), mix_counts_(mix_counts) {
    for (const auto& [name, weight] : config.mix) {
      for (unsigned w = 0; w < weight; ++w) cycle_.push_back(kind_from_name(name));
    }
  }

  std::vector<NamedTask> tasks;

  void build(const std::string& suite, long prime, std::size_t suite_index, std::size_t prime_index) {
    Prime p(prime);
    std::uint64_t lane = suite_index * 16 + prime_index;
    ScenarioGenerator gen(p, RandomStream(config_.seed, lane));
    ScenarioGenerator small(p, RandomStream(config_.seed, lane + 1000), 0, 2);
    suite_ = suite;
    prime_ = prime;
    if (suite == "core") core(gen);
    if (suite == "poisson") poisson(gen, small);
    if (suite == "representation") representation(gen, small);
    if (suite == "ergodicity") ergodicity(gen);
  }

 private:
  void add(std::size_t index, std::uint64_t seed, Task run) {
    tasks.push_back(NamedTask{suite_ + ".", index_suffix(prime_, index), seed, std::move(run)});
  }

  McPlan plan(std::size_t index, const char* what) const {
    std::string key = suite_ + "/" + what + index_suffix(prime_, index) + "/" + std::to_string(config_.seed);
    return McPlan{config_.samples, std::stoull(fnv1a_digest(key), nullptr, 16), config_.lanes};
  }

  AffineElement pick(ScenarioGenerator& gen, std::size_t i) {
    ElementKind kind = cycle_[i % cycle_.size()];
    ++mix_counts_[std::string(to_string(kind))];
    return gen.element(kind);
  }

  AffineElement pick_bijective(ScenarioGenerator& gen, std::size_t i) {
    for (std::size_t k = 0; k < cycle_.size(); ++k) {
      ElementKind kind = cycle_[(i + k) % cycle_.size()];
      if (kind == ElementKind::non_bijective) continue;
      ++mix_counts_[std::string(to_string(kind))];
      return gen.element(kind);
    }
    ++mix_counts_["bijective"];
    return gen.bijective();
  }

  static RepFunction polynomial_functional(ScenarioGenerator& gen) {
    std::vector<StepFunction> slots{gen.step(2), gen.step(2)};
    Psi psi = Psi::constant(2, GaussianRational(gen.value())) + Psi::slot(2, 0) * Psi::slot(2, 1) +
              Psi::constant(2, GaussianRational(gen.value())) * Psi::slot(2, 1) * Psi::slot(2, 1);
    Prime p = gen.prime();
    return RepFunction(p, GaussianRational(gen.value()), Rational(0), gen.mark(2), constant(p, 1), std::move(slots),
                       std::move(psi));
  }

  static Ball disjoint_ball(ScenarioGenerator& gen, const Ball& avoid) {
    for (int tries = 0; tries < 64; ++tries) {
      Ball b = gen.ball();
      if (relate(b, avoid) == BallRelation::disjoint) return b;
    }
    // Moving the center by more than the radius gives a disjoint sibling.
    Rational step = prime_power(gen.prime(), -avoid.level() - 1);
    return Ball(avoid.center() + step, avoid.level(), gen.prime());
  }

  static std::vector<CheckRecord> one(CheckRecord r) { return {std::move(r)}; }

  void core(ScenarioGenerator& gen) {
    const std::size_t n = config_.cases;
    for (std::size_t i = 0; i < n; ++i) {
      auto g = pick(gen, i);
      auto f = gen.step();
      add(i, gen.rng().seed(), [g, f] { return std::vector{check_change_of_variables(g, f), check_mass_defect(g)}; });
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n / 2); ++i) {
      Ball b = gen.ball();
      Ball lambda = gen.rng().coin(0.3) ? b : gen.ball_inside(b);
      Rational h = gen.value() * prime_power(gen.prime(), gen.rng().between(-b.level() - 2, -b.level() + 1));
      auto g = AffineElement::translation(Region(b), h);
      auto f = gen.step_inside(lambda);
      add(i, gen.rng().seed(),
          [g, lambda, f] { return one(check_support_shift(g, RegionSet(Region(lambda)), f)); });
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n / 8); ++i) {
      auto g = pick(gen, 2 * i), h = pick(gen, 2 * i + 1);
      auto f = polynomial_functional(gen);
      RandomStream rng = gen.rng().split(i);
      add(i, rng.seed(), [g, h, f, rng]() mutable { return check_composition_all(g, h, f, 50, rng); });
    }
  }

  void poisson(ScenarioGenerator& gen, ScenarioGenerator& small) {
    const std::size_t n = config_.cases;
    for (std::size_t i = 0; i < n; ++i) {
      auto g = pick(gen, i);
      auto phi = gen.mark();
      add(i, gen.rng().seed(), [g, phi] { return one(check_pushforward_lemma(g, phi)); });
    }
    for (std::size_t i = 0; i < 2; ++i) {
      auto g = pick(small, i);
      auto phi = small.mark(2);
      auto mc = plan(i, "lemma_mc");
      add(i, mc.seed, [g, phi, mc] { return one(check_pushforward_lemma_mc(g, phi, mc)); });
    }
    {
      Ball window(Rational(0), 0, gen.prime());
      auto f = gen.step_inside(window);
      auto mc = plan(0, "sampler");
      add(0, mc.seed, [window, f, mc] { return check_sampler(window, f, mc); });
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n / 2); ++i) {
      Ball b1 = gen.ball();
      Ball b2 = disjoint_ball(gen, b1);
      auto phi1 = gen.mark_inside(b1), phi2 = gen.mark_inside(b2);
      add(i, gen.rng().seed(), [phi1, phi2] { return one(check_independence(phi1, phi2)); });
    }
  }

  void representation(ScenarioGenerator& gen, ScenarioGenerator& small) {
    const std::size_t n = config_.cases;
    for (std::size_t i = 0; i < n; ++i) {
      auto g = pick(gen, i);
      auto phi = gen.mark();
      add(i, gen.rng().seed(), [g, phi] { return std::vector{check_isometry(g, phi), check_rn_normalization(g)}; });
    }
    for (std::size_t i = 0; i < 2; ++i) {
      auto g = pick_bijective(small, i);
      auto phi = small.mark(2);
      auto iso = plan(i, "isometry_mc");
      auto rn = plan(i, "rn_mc");
      add(i, iso.seed, [g, phi, iso, rn] {
        return std::vector{check_isometry_mc(g, phi, iso), check_rn_normalization_mc(g, rn)};
      });
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n / 4); ++i) {
      auto g1 = pick_bijective(gen, 2 * i), g2 = pick_bijective(gen, 2 * i + 1);
      auto f = polynomial_functional(gen);
      RandomStream rng = gen.rng().split(i);
      add(i, rng.seed(), [g1, g2, f, rng]() mutable {
        std::vector<ScenarioObject> objects{g1, g2};
        for (const auto& fn : {apply_U(g2, apply_U(g1, f)), apply_U(product_motion(g1, g2), f),
                               apply_U(product_motion(g2, g1), f)}) {
          for (auto& o : fn.objects()) objects.push_back(std::move(o));
        }
        auto window = window_for(objects);
        long resolution = sampling_resolution(objects);
        std::vector<Configuration> gammas;
        for (int k = 0; k < 50; ++k) gammas.push_back(sample_configuration(window, resolution, rng));
        return one(check_u_composition(g1, g2, f, gammas));
      });
    }
  }

  void ergodicity(ScenarioGenerator& gen) {
    const std::size_t n = config_.cases;
    for (std::size_t i = 0; i < n; ++i) {
      auto phi1 = gen.mark(), phi2 = gen.mark();
      add(i, gen.rng().seed(), [phi1, phi2] { return one(check_factorization(phi1, phi2)); });
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n / 2); ++i) {
      Ball b = gen.ball();
      // |h| <= radius: B + h = B, so Lambda only has to avoid B.
      Rational h = gen.unit() * prime_power(gen.prime(), -b.level());
      Ball lambda = disjoint_ball(gen, b);
      auto g = AffineElement::translation(Region(b), h);
      auto phi = gen.mark_inside(lambda);
      add(i, gen.rng().seed(), [g, lambda, phi] {
        return one(check_invariance(g, RegionSet(Region(lambda)), phi, HypothesisMode::strengthened));
      });
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n / 4); ++i) {
      Ball b = gen.ball();
      // |h| > radius: B + h is disjoint from B and Lambda = B meets only B.
      Rational h = gen.unit() * prime_power(gen.prime(), -b.level() - 1);
      auto g = AffineElement::translation(Region(b), h);
      auto phi = gen.mark_inside(b);
      add(i, gen.rng().seed(), [g, b, phi] {
        return one(check_invariance(g, RegionSet(Region(b)), phi, HypothesisMode::literal));
      });
    }
  }

  const LabConfig& config_;
  std::map<std::string, std::size_t>& mix_counts_;
  std::vector<ElementKind> cycle_;
  std::string suite_;
  long prime_ = 0;
};

CheckRecord unexpected(const std::string& what) {
  CheckRecord r;
  r.outcome = Outcome::fail;
  r.witness = ordered_json{{"error", what}};
  return r;
}

std::vector<std::vector<CheckRecord>> run_tasks(const std::vector<NamedTask>& tasks, std::size_t workers) {
  std::vector<std::vector<CheckRecord>> results(tasks.size());
  auto run_one = [&](std::size_t i) {
    try {
      results[i] = tasks[i].run();
    } catch (const std::exception& e) {
      results[i] = {unexpected(e.what())};
    }
    for (auto& r : results[i]) {
      if (r.check_id.empty()) r.check_id = "unexpected";
      r.check_id = tasks[i].prefix + r.check_id + tasks[i].suffix;
      if (r.seed == 0) r.seed = tasks[i].seed;
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) run_one(i);
    });
  }
  pool.clear();
  return results;
}

bool selected(const LabConfig& config, const std::string& suite) {
  return std::any_of(config.suites.begin(), config.suites.end(),
                     [&](const std::string& s) { return s == "all" || s == suite; });
}

}  // namespace

SuiteReport run_suite(const LabConfig& config) {
  config.validate();
  SuiteReport report;
  SuiteBuilder builder(config, report.element_mix);
  for (std::size_t s = 0; s < std::size(kSuites); ++s) {
    if (!selected(config, kSuites[s])) continue;
    for (std::size_t k = 0; k < config.primes.size(); ++k) builder.build(kSuites[s], config.primes[k], s, k);
  }
  std::size_t workers = worker_threads(builder.tasks.size() == 0 ? 1 : builder.tasks.size());
  for (auto& batch : run_tasks(builder.tasks, workers)) {
    for (auto& r : batch) report.records.push_back(std::move(r));
  }

  bool with_registry = std::find(config.suites.begin(), config.suites.end(), "all") != config.suites.end();
  report.registry_ok = true;
  if (with_registry) {
    auto registry = counterexample_registry();
    report.registry_ok = registry_complete(registry);
    for (auto& r : registry) report.records.push_back(std::move(r));
  }

  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const CheckRecord& l, const CheckRecord& r) { return l.check_id < r.check_id; });
  for (const auto& r : report.records) {
    switch (r.outcome) {
      case Outcome::pass: ++report.passed; break;
      case Outcome::fail: ++report.failed; break;
      case Outcome::documented_fail: ++report.documented; break;
    }
  }
  return report;
}

std::string SuiteReport::summary() const {
  std::ostringstream out;
  std::size_t mc = 0;
  std::map<std::string, std::array<std::size_t, 3>> by_suite;
  for (const auto& r : records) {
    if (r.kind == CheckKind::monte_carlo) ++mc;
    auto& counts = by_suite[r.check_id.substr(0, r.check_id.find('.'))];
    ++counts[static_cast<std::size_t>(r.outcome)];
  }
  out << "checks: " << records.size() << "  pass: " << passed << "  fail: " << failed
      << "  documented-fail: " << documented << "\n";
  for (const auto& [suite, c] : by_suite) {
    out << "  " << suite << ": pass " << c[0] << ", fail " << c[1] << ", documented-fail " << c[2] << "\n";
  }
  out << "element mix:";
  for (const auto& [kind, count] : element_mix) out << " " << kind << "=" << count;
  out << "\n";
  out << "monte carlo checks: " << mc << " (4 sigma; false-alarm bound " << static_cast<double>(mc) * kTailProbability4Sigma
      << ")\n";
  out << "documented divergences:\n";
  for (const auto& r : records) {
    if (r.outcome == Outcome::documented_fail) {
      out << "  " << r.check_id;
      if (r.lhs && r.rhs) out << "  " << to_string(*r.lhs) << " vs " << to_string(*r.rhs);
      out << "\n";
    }
  }
  out << "registry: " << (registry_ok ? "complete" : "INCOMPLETE") << "\n";
  for (const auto& r : records) {
    if (r.outcome == Outcome::fail) out << "FAILED " << r.check_id << "\n";
  }
  out << (ok() ? "verdict: pass\n" : "verdict: FAIL\n");
  return out.str();
}

SuiteReport run_suite_to_files(const LabConfig& config) {
  SuiteReport report = run_suite(config);
  std::ofstream jsonl(config.out, std::ios::binary);
  if (!jsonl) throw std::runtime_error("cannot write report to " + config.out);
  for (const auto& r : report.records) jsonl << to_json(r).dump() << "\n";
  std::ofstream summary(config.out + ".summary.txt", std::ios::binary);
  if (!summary) throw std::runtime_error("cannot write summary next to " + config.out);
  summary << report.summary();
  if (!jsonl || !summary) throw std::runtime_error("short write while saving the report");
  return report;
}

}  // namespace afflab
