#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "afflab/lab.hpp"

namespace afflab {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::documented_fail: return "documented-fail";
  }
  return "fail";
}

std::string_view to_string(CheckKind kind) { return kind == CheckKind::exact ? "exact" : "mc"; }
std::string_view to_string(ProductMode mode) { return mode == ProductMode::motion ? "motion" : "pointwise"; }
std::string_view to_string(InverseMode mode) { return mode == InverseMode::motion ? "motion" : "pointwise"; }
std::string_view to_string(HypothesisMode mode) {
  return mode == HypothesisMode::literal ? "literal" : "strengthened";
}
std::string_view to_string(CompositionOrder order) { return order == CompositionOrder::gh ? "g.h" : "h.g"; }

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view text, const E (&values)[N], const char* what) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr Outcome kOutcomes[] = {Outcome::pass, Outcome::fail, Outcome::documented_fail};
constexpr CheckKind kKinds[] = {CheckKind::exact, CheckKind::monte_carlo};
constexpr ProductMode kProducts[] = {ProductMode::motion, ProductMode::pointwise};
constexpr InverseMode kInverses[] = {InverseMode::motion, InverseMode::pointwise};

}  // namespace

bool CheckRecord::certificate_holds() const {
  for (const auto& e : extra) {
    if (e.lhs != e.rhs) return false;
  }
  if (kind == CheckKind::exact) return lhs && rhs && *lhs == *rhs;
  if (!mean || !target || !std_error) return false;
  double slack = sigmas * *std_error + 1e-12 * (1.0 + std::abs(*target));
  return std::abs(*mean - *target) <= slack;
}

bool reverify(const CheckRecord& record) { return record.certificate_holds() == (record.outcome == Outcome::pass); }

std::string fnv1a_digest(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

nlohmann::ordered_json to_json(const CheckRecord& r, bool with_runtime) {
  nlohmann::ordered_json j;
  j["check_id"] = r.check_id;
  j["inputs_digest"] = r.inputs_digest;
  j["product_mode"] = to_string(r.product_mode);
  j["inverse_mode"] = to_string(r.inverse_mode);
  j["kind"] = to_string(r.kind);
  j["outcome"] = to_string(r.outcome);
  if (r.lhs) j["lhs"] = to_string(*r.lhs);
  if (r.rhs) j["rhs"] = to_string(*r.rhs);
  for (const auto& e : r.extra) {
    j[e.name + "_lhs"] = to_string(e.lhs);
    j[e.name + "_rhs"] = to_string(e.rhs);
  }
  if (r.kind == CheckKind::monte_carlo) {
    if (r.mean) j["mean"] = *r.mean;
    if (r.target) j["target"] = *r.target;
    if (r.std_error) j["stderr"] = *r.std_error;
    if (r.n) j["n"] = *r.n;
    j["sigmas"] = r.sigmas;
    j["verdict"] = r.certificate_holds();
  }
  j["seed"] = r.seed;
  if (with_runtime) j["runtime"] = r.runtime_seconds;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  return j;
}

CheckRecord check_record_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw std::invalid_argument("check record must be a JSON object");
  CheckRecord r;
  r.check_id = j.at("check_id").get<std::string>();
  r.inputs_digest = j.value("inputs_digest", "");
  r.product_mode = parse_enum(j.value("product_mode", "motion"), kProducts, "product mode");
  r.inverse_mode = parse_enum(j.value("inverse_mode", "motion"), kInverses, "inverse mode");
  r.kind = parse_enum(j.at("kind").get<std::string>(), kKinds, "check kind");
  r.outcome = parse_enum(j.at("outcome").get<std::string>(), kOutcomes, "outcome");
  if (j.contains("lhs")) r.lhs = parse_rational(j["lhs"].get<std::string>());
  if (j.contains("rhs")) r.rhs = parse_rational(j["rhs"].get<std::string>());
  for (const auto& [key, value] : j.items()) {
    constexpr std::string_view suffix = "_lhs";
    if (key.size() <= suffix.size() || key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    std::string name = key.substr(0, key.size() - suffix.size());
    r.extra.push_back({name, parse_rational(value.get<std::string>()),
                       parse_rational(j.at(name + "_rhs").get<std::string>())});
  }
  if (j.contains("mean")) r.mean = j["mean"].get<double>();
  if (j.contains("target")) r.target = j["target"].get<double>();
  if (j.contains("stderr")) r.std_error = j["stderr"].get<double>();
  if (j.contains("n")) r.n = j["n"].get<std::uint64_t>();
  r.sigmas = j.value("sigmas", 4.0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.runtime_seconds = j.value("runtime", 0.0);
  if (j.contains("witness")) r.witness = j["witness"];
  return r;
}

}  // namespace afflab
