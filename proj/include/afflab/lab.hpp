#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "afflab/affine.hpp"
#include "afflab/generators.hpp"
#include "afflab/monte_carlo.hpp"
#include "afflab/poisson.hpp"
#include "afflab/representation.hpp"

namespace afflab {

enum class Outcome { pass, fail, documented_fail };
enum class CheckKind { exact, monte_carlo };
enum class ProductMode { motion, pointwise };
enum class HypothesisMode { literal, strengthened };
/// Which composite V_h V_g is compared with: product(g, h) or product(h, g),
/// where product(x, y) applies y first.
enum class CompositionOrder { gh, hg };

std::string_view to_string(Outcome outcome);
std::string_view to_string(CheckKind kind);
std::string_view to_string(ProductMode mode);
std::string_view to_string(InverseMode mode);
std::string_view to_string(HypothesisMode mode);
std::string_view to_string(CompositionOrder order);

/// A side condition certified alongside the main comparison.
struct NamedEquality {
  std::string name;
  Rational lhs, rhs;
};

/// One verdict. Exact records compare lhs with rhs; Monte Carlo records compare
/// mean with target at `sigmas` standard errors. Both also require every extra
/// equality. The verdict can be recomputed from the record alone.
struct CheckRecord {
  std::string check_id;
  std::string inputs_digest;
  ProductMode product_mode = ProductMode::motion;
  InverseMode inverse_mode = InverseMode::motion;
  CheckKind kind = CheckKind::exact;
  Outcome outcome = Outcome::fail;

  std::optional<Rational> lhs, rhs;
  std::vector<NamedEquality> extra;

  std::optional<double> mean, target, std_error;
  std::optional<std::uint64_t> n;
  double sigmas = 4.0;

  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  /// Machine-checkable data for documented failures and diagnostics.
  nlohmann::ordered_json witness;

  /// Whether the stored sides/estimates hold.
  bool certificate_holds() const;
};

/// Recomputes the verdict from the stored certificate: a pass must hold, a
/// (documented) failure must not.
bool reverify(const CheckRecord& record);

nlohmann::ordered_json to_json(const CheckRecord& record, bool with_runtime = false);
CheckRecord check_record_from_json(const nlohmann::ordered_json& j);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_digest(std::string_view text);

// Checks. A certificate that does not hold in a mode known to diverge from the
// literal statement is recorded as documented_fail instead of fail.

CheckRecord check_change_of_variables(const AffineElement& g, const StepFunction& f);
CheckRecord check_mass_defect(const AffineElement& g);
CheckRecord check_pushforward_lemma(const AffineElement& g, const StepFunction& phi);
/// E[prod (g phi)] against exp of the exact exponent; each sample also checks
/// prod (g phi)(gamma) == prod phi(g gamma) exactly.
CheckRecord check_pushforward_lemma_mc(const AffineElement& g, const StepFunction& phi, const McPlan& plan);

/// g = (1, h 1_B) with Lambda inside B; f must be supported in Lambda.
/// Throws std::invalid_argument when the preconditions fail.
CheckRecord check_support_shift(const AffineElement& g, const RegionSet& lambda, const StepFunction& f);

/// Compares E[V_g F] with E[F] for F = prod phi, phi - 1 supported in Lambda.
/// Throws std::invalid_argument when the chosen hypothesis does not hold.
CheckRecord check_invariance(const AffineElement& g, const RegionSet& lambda, const StepFunction& phi,
                             HypothesisMode mode);

struct Separator {
  AffineElement element;
  Ball ball;
  Rational shift;
};
/// In-ball translation moving lambda2 off lambda1 and lambda2 while staying bijective.
Separator find_separator(const RegionSet& lambda1, const RegionSet& lambda2, Prime p);
/// Re-checks the separator guarantees with region algebra.
bool separator_certified(const Separator& s, const RegionSet& lambda1, const RegionSet& lambda2);

/// Factorization identity for marks phi1, phi2, plus E[V_g F2] = E[F2] and the
/// separator certificate as extra equalities.
CheckRecord check_factorization(const StepFunction& phi1, const StepFunction& phi2);

/// Exact isometry exponents for F = prod phi. Non-bijective g switches to the
/// pointwise inverse and an unequal result is a documented failure.
CheckRecord check_isometry(const AffineElement& g, const StepFunction& phi);
/// Paired E[|U_g F|^2 - |F|^2] against 0. g must be bijective.
CheckRecord check_isometry_mc(const AffineElement& g, const StepFunction& phi, const McPlan& plan);

/// Compares V_h V_g F with V_{product} F on every configuration, for one mode
/// and one order. lhs counts agreeing configurations, rhs is their number.
CheckRecord check_composition(const AffineElement& g, const AffineElement& h, const RepFunction& f,
                              std::span<const Configuration> gammas, ProductMode mode, CompositionOrder order);
/// All four (mode, order) combinations on sampled configurations.
std::vector<CheckRecord> check_composition_all(const AffineElement& g, const AffineElement& h, const RepFunction& f,
                                               std::size_t samples, RandomStream& rng);

/// |U_{g2} U_{g1} F|^2 = |U_{g1 ⋄ g2} F|^2 on every configuration (V reverses
/// products). The literal order is counted in the witness. Throws
/// NonBijectiveElement unless both are bijective.
CheckRecord check_u_composition(const AffineElement& g1, const AffineElement& g2, const RepFunction& f,
                                std::span<const Configuration> gammas);

/// E[R(g, .)] = 1: exponent of the exact class versus 0.
CheckRecord check_rn_normalization(const AffineElement& g);
CheckRecord check_rn_normalization_mc(const AffineElement& g, const McPlan& plan);

/// Per-cell counts of the children of `window`, pair correlation of two
/// disjoint cells, and the Campbell mean of a step function.
std::vector<CheckRecord> check_sampler(const Ball& window, const StepFunction& f, const McPlan& plan);

/// Exact independence over disjoint supports.
CheckRecord check_independence(const StepFunction& phi1, const StepFunction& phi2);

/// The documented divergences; every entry has outcome documented_fail when the
/// engine reproduces it.
std::vector<CheckRecord> counterexample_registry();
/// All required entries present and reproduced.
bool registry_complete(std::span<const CheckRecord> registry);

struct LabConfig {
  std::vector<long> primes{2, 3, 5};
  std::uint64_t seed = 1;
  std::uint64_t samples = 10000;
  std::vector<std::string> suites{"all"};
  /// Relative weights of generated element kinds.
  std::map<std::string, unsigned> mix{
      {"translation", 1}, {"swap", 1}, {"unit_scaling", 1}, {"non_bijective", 1}, {"composite", 1}};
  std::string out = "report.jsonl";
  std::size_t cases = 40;
  std::size_t lanes = 16;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

LabConfig lab_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const LabConfig& config);

struct SuiteReport {
  std::vector<CheckRecord> records;
  std::map<std::string, std::size_t> element_mix;
  std::size_t passed = 0, failed = 0, documented = 0;
  bool registry_ok = false;

  bool ok() const { return failed == 0 && registry_ok; }
  std::string summary() const;
};

/// Runs the selected suites. Records are ordered by check_id, so the report
/// bytes depend only on the configuration.
SuiteReport run_suite(const LabConfig& config);
/// run_suite, then writes the JSON-lines report and `<out>.summary.txt`.
SuiteReport run_suite_to_files(const LabConfig& config);

}  // namespace afflab
