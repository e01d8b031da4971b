#pragma once

#include <complex>

#include <nlohmann/json.hpp>

#include "afflab/affine.hpp"
#include "afflab/poisson.hpp"
#include "afflab/representation.hpp"

namespace afflab::json {

using nlohmann::json;
using nlohmann::ordered_json;

// Every reader throws std::invalid_argument on malformed input.

ordered_json write(const Rational& x);
Rational read_rational(const json& j);

ordered_json write(const Ball& ball);
Ball read_ball(const json& j, Prime p);

/// A ball, or {"center","level","exclude":[balls]} for a punctured ball.
ordered_json write(const Region& region);
Region read_region(const json& j, Prime p);

/// {"default": value, "pieces": [{"region": ..., "value": ...}]}
ordered_json write(const StepFunction& f);
StepFunction read_step(const json& j, Prime p);
/// Values as [re, im].
ordered_json write(const ComplexStepFunction& f);
ComplexStepFunction read_complex_step(const json& j, Prime p);

/// {"prime": p, "a": step, "b": step}
ordered_json write(const AffineElement& g);
AffineElement read_element(const json& j);

/// Array of rational strings.
ordered_json write(const Configuration& gamma);
Configuration read_configuration(const json& j);

/// A rational string, or [re, im] when the imaginary part is non-zero.
ordered_json write(const GaussianRational& z);
GaussianRational read_gaussian(const json& j);

ordered_json write(const Psi& psi);
Psi read_psi(const json& j);

ordered_json write(const RepFunction& f);
RepFunction read_rep_function(const json& j);

ordered_json write(const ExpectationResult& r);

/// Prime from a JSON number; throws std::invalid_argument.
Prime read_prime(const json& j);

}  // namespace afflab::json
