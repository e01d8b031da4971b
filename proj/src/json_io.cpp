#include "afflab/json_io.hpp"

#include <stdexcept>
#include <string>

namespace afflab::json {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("json: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object with '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

long read_long(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<long>();
}

}  // namespace

ordered_json write(const Rational& x) { return to_string(x); }

Rational read_rational(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  bad("rationals are strings like \"3/4\"");
}

Prime read_prime(const json& j) { return Prime(read_long(j, "prime")); }

ordered_json write(const Ball& ball) {
  return ordered_json{{"center", to_string(ball.center())}, {"level", ball.level()}};
}

Ball read_ball(const json& j, Prime p) {
  return Ball(read_rational(field(j, "center")), read_long(field(j, "level"), "level"), p);
}

ordered_json write(const Region& region) {
  ordered_json out = write(region.base());
  if (!region.is_ball()) {
    ordered_json holes = ordered_json::array();
    for (const auto& hole : region.exclusions()) holes.push_back(write(hole));
    out["exclude"] = std::move(holes);
  }
  return out;
}

Region read_region(const json& j, Prime p) {
  Ball base = read_ball(j, p);
  std::vector<Ball> holes;
  if (auto it = j.find("exclude"); it != j.end()) {
    if (!it->is_array()) bad("'exclude' must be an array of balls");
    for (const auto& hole : *it) holes.push_back(read_ball(hole, p));
  }
  return Region(base, std::move(holes));
}

namespace {

template <class V, class WriteValue>
ordered_json write_step(const BasicStepFunction<V>& f, WriteValue write_value) {
  ordered_json pieces = ordered_json::array();
  for (const auto& piece : f.pieces()) {
    pieces.push_back(ordered_json{{"region", write(piece.region)}, {"value", write_value(piece.value)}});
  }
  return ordered_json{{"default", write_value(f.default_value())}, {"pieces", std::move(pieces)}};
}

template <class V, class ReadValue>
BasicStepFunction<V> read_step_generic(const json& j, Prime p, ReadValue read_value) {
  V default_value = read_value(field(j, "default"));
  std::vector<typename BasicStepFunction<V>::Piece> pieces;
  if (auto it = j.find("pieces"); it != j.end()) {
    if (!it->is_array()) bad("'pieces' must be an array");
    for (const auto& piece : *it) {
      pieces.push_back({read_region(field(piece, "region"), p), read_value(field(piece, "value"))});
    }
  }
  return BasicStepFunction<V>::normalize(p, std::move(pieces), std::move(default_value));
}

std::complex<double> read_complex(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad("complex values are [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {read_rational(j).get_d(), 0.0};
}

}  // namespace

ordered_json write(const StepFunction& f) {
  return write_step(f, [](const Rational& x) { return write(x); });
}

StepFunction read_step(const json& j, Prime p) { return read_step_generic<Rational>(j, p, read_rational); }

ordered_json write(const ComplexStepFunction& f) {
  return write_step(f, [](const std::complex<double>& z) { return ordered_json::array({z.real(), z.imag()}); });
}

ComplexStepFunction read_complex_step(const json& j, Prime p) {
  return read_step_generic<std::complex<double>>(j, p, read_complex);
}

ordered_json write(const AffineElement& g) {
  return ordered_json{{"prime", g.prime().value()}, {"a", write(g.a())}, {"b", write(g.b())}};
}

AffineElement read_element(const json& j) {
  Prime p = read_prime(field(j, "prime"));
  StepFunction a = j.contains("a") ? read_step(j["a"], p) : constant(p, 1);
  StepFunction b = j.contains("b") ? read_step(j["b"], p) : constant(p, 0);
  return AffineElement(std::move(a), std::move(b));
}

ordered_json write(const Configuration& gamma) {
  ordered_json out = ordered_json::array();
  for (const auto& x : gamma.points()) out.push_back(to_string(x));
  return out;
}

Configuration read_configuration(const json& j) {
  if (!j.is_array()) bad("a configuration is an array of rational strings");
  std::vector<Rational> points;
  for (const auto& x : j) points.push_back(read_rational(x));
  return Configuration(std::move(points));
}

ordered_json write(const GaussianRational& z) {
  if (sgn(z.im) == 0) return write(z.re);
  return ordered_json::array({to_string(z.re), to_string(z.im)});
}

GaussianRational read_gaussian(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) bad("complex rationals are [re, im]");
    return GaussianRational(read_rational(j[0]), read_rational(j[1]));
  }
  return GaussianRational(read_rational(j));
}

ordered_json write(const Psi& psi) {
  ordered_json terms = ordered_json::array();
  for (const auto& term : psi.terms()) {
    ordered_json freqs = ordered_json::array();
    for (const auto& t : term.frequencies) freqs.push_back(to_string(t));
    terms.push_back(ordered_json{{"coefficient", write(term.coefficient)}, {"powers", term.powers}, {"frequencies", freqs}});
  }
  return ordered_json{{"arity", psi.arity()}, {"terms", std::move(terms)}};
}

Psi read_psi(const json& j) {
  long arity = read_long(field(j, "arity"), "arity");
  if (arity < 0) bad("arity must be non-negative");
  std::vector<PsiTerm> terms;
  const json& list = field(j, "terms");
  if (!list.is_array()) bad("'terms' must be an array");
  for (const auto& t : list) {
    PsiTerm term{read_gaussian(field(t, "coefficient")), {}, {}};
    if (auto it = t.find("powers"); it != t.end()) {
      if (!it->is_array()) bad("'powers' must be an array");
      for (const auto& e : *it) {
        long power = read_long(e, "power");
        if (power < 0) bad("powers must be non-negative");
        term.powers.push_back(static_cast<unsigned>(power));
      }
    }
    if (auto it = t.find("frequencies"); it != t.end()) {
      if (!it->is_array()) bad("'frequencies' must be an array");
      for (const auto& f : *it) term.frequencies.push_back(read_rational(f));
    }
    terms.push_back(std::move(term));
  }
  return Psi(static_cast<std::size_t>(arity), std::move(terms));
}

ordered_json write(const RepFunction& f) {
  ordered_json slots = ordered_json::array();
  for (const auto& slot : f.slots()) slots.push_back(write(slot));
  return ordered_json{{"prime", f.prime().value()},
                      {"coefficient", write(f.coefficient())},
                      {"log_factor", to_string(f.log_factor())},
                      {"multiplicative", write(f.multiplicative())},
                      {"root_multiplicative", write(f.root_multiplicative())},
                      {"slots", std::move(slots)},
                      {"psi", write(f.psi())}};
}

RepFunction read_rep_function(const json& j) {
  Prime p = read_prime(field(j, "prime"));
  GaussianRational coefficient = j.contains("coefficient") ? read_gaussian(j["coefficient"]) : GaussianRational(1);
  Rational log_factor = j.contains("log_factor") ? read_rational(j["log_factor"]) : Rational(0);
  StepFunction phi = j.contains("multiplicative") ? read_step(j["multiplicative"], p) : constant(p, 1);
  StepFunction sigma = j.contains("root_multiplicative") ? read_step(j["root_multiplicative"], p) : constant(p, 1);
  std::vector<StepFunction> slots;
  if (auto it = j.find("slots"); it != j.end()) {
    if (!it->is_array()) bad("'slots' must be an array");
    for (const auto& s : *it) slots.push_back(read_step(s, p));
  }
  Psi psi = j.contains("psi") ? read_psi(j["psi"]) : Psi::constant(slots.size(), GaussianRational(1));
  return RepFunction(p, std::move(coefficient), std::move(log_factor), std::move(phi), std::move(sigma),
                     std::move(slots), std::move(psi));
}

ordered_json write(const ExpectationResult& r) {
  ordered_json out;
  out["kind"] = r.kind == ExpectationKind::exact ? "exact" : "mc";
  if (r.exponent) out["exponent"] = to_string(*r.exponent);
  if (r.coefficient) out["coefficient"] = write(*r.coefficient);
  out["value"] = r.value.real();
  if (r.value.imag() != 0.0) out["value_imag"] = r.value.imag();
  out["stderr"] = r.std_error;
  out["seed"] = r.seed;
  out["n"] = r.n;
  return out;
}

}  // namespace afflab::json
