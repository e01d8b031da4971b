#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "afflab/errors.hpp"
#include "afflab/json_io.hpp"
#include "afflab/lab.hpp"

namespace {

using namespace afflab;
using nlohmann::ordered_json;

constexpr int kPass = 0;
constexpr int kFailure = 1;
constexpr int kInvalid = 2;

// Bad user input, reported with exit code 2.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json parse_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text, path);
}

struct VerifyOptions {
  std::string config_file;
  std::vector<std::string> suites;
  std::vector<long> primes;
  std::optional<std::uint64_t> seed, samples;
  std::optional<std::size_t> cases;
  std::string out;
  bool quiet = false;
};

int run_verify(const VerifyOptions& o) {
  LabConfig config;
  if (!o.config_file.empty()) config = lab_config_from_json(parse_file(o.config_file));
  if (!o.suites.empty()) config.suites = o.suites;
  if (!o.primes.empty()) config.primes = o.primes;
  if (o.seed) config.seed = *o.seed;
  if (o.samples) config.samples = *o.samples;
  if (o.cases) config.cases = *o.cases;
  if (!o.out.empty()) config.out = o.out;
  config.validate();

  SuiteReport report = run_suite_to_files(config);
  if (!o.quiet) std::cout << report.summary();
  std::cout << "report: " << config.out << "\n";
  return report.ok() ? kPass : kFailure;
}

struct SampleOptions {
  std::string window;
  long prime = 3;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::optional<long> resolution;
};

int run_sample(const SampleOptions& o) {
  Prime p(o.prime);
  Ball window = json::read_ball(parse_text(o.window, "--window"), p);
  long resolution = o.resolution.value_or(window.level() - 4);
  if (resolution > window.level()) throw InvalidInput("--resolution must not exceed the window level");
  WindowSpec spec = make_window({Region(window)});
  RandomStream rng(o.seed);
  for (std::size_t i = 0; i < o.count; ++i) {
    std::cout << json::write(sample_configuration(spec, resolution, rng)).dump() << "\n";
  }
  return kPass;
}

int run_density(const std::string& element_file) {
  AffineElement g = json::read_element(parse_file(element_file));
  auto certificate = is_bijective(g);
  ordered_json out{{"element", json::write(g)},
                   {"density", json::write(pushforward_density(g))},
                   {"mass_defect", to_string(mass_defect(g))},
                   {"bijective", certificate.verdict}};
  std::cout << out.dump(2) << "\n";
  return kPass;
}

int run_counterexamples() {
  auto registry = counterexample_registry();
  for (const auto& r : registry) std::cout << to_json(r).dump() << "\n";
  bool complete = registry_complete(registry);
  if (!complete) std::cerr << "counterexample registry is incomplete\n";
  return complete ? kPass : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Monte Carlo checks for affine actions on p-adic configuration spaces"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Run check suites and write a JSON-lines report");
  v->add_option("config,--config", verify.config_file, "LabConfig JSON file")->check(CLI::ExistingFile);
  v->add_option("--suite", verify.suites, "all|core|poisson|representation|ergodicity (repeatable)")
      ->check(CLI::IsMember({"all", "core", "poisson", "representation", "ergodicity"}));
  v->add_option("--prime", verify.primes, "Prime(s) to test (repeatable)");
  v->add_option("--seed", verify.seed, "Master seed");
  v->add_option("--samples", verify.samples, "Monte Carlo samples per check");
  v->add_option("--cases", verify.cases, "Generated cases per check and prime");
  v->add_option("--out", verify.out, "Report path (summary goes to <out>.summary.txt)");
  v->add_flag("--quiet", verify.quiet, "Do not print the summary");

  SampleOptions sample;
  auto* s = app.add_subcommand("sample", "Draw Poisson configurations in a ball");
  s->add_option("--window", sample.window, R"(Ball as JSON, e.g. {"center":"0","level":1})")->required();
  s->add_option("--prime", sample.prime, "Prime");
  s->add_option("--seed", sample.seed, "Seed");
  s->add_option("--count", sample.count, "Number of configurations");
  s->add_option("--resolution", sample.resolution, "Level of the finest sampling cells (default window level - 4)");

  std::string element_file;
  auto* d = app.add_subcommand("density", "Print the pushforward density of an element");
  d->add_option("--element", element_file, "Element JSON file {prime, a, b}")->required()->check(CLI::ExistingFile);

  auto* c = app.add_subcommand("counterexamples", "Print the counterexample registry as JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInvalid;
  }

  try {
    if (*v) return run_verify(verify);
    if (*s) return run_sample(sample);
    if (*d) return run_density(element_file);
    if (*c) return run_counterexamples();
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return kFailure;
  }
  return kInvalid;
}
