#include "afflab/step_function.hpp"

namespace afflab {

Rational integrate(const StepFunction& f) {
  if (sgn(f.default_value()) != 0) throw std::domain_error("integrate: default value must be 0");
  Rational total = 0;
  for (const auto& piece : f.pieces()) total += piece.value * piece.region.measure();
  return total;
}

std::complex<double> integrate(const ComplexStepFunction& f) {
  if (f.default_value() != std::complex<double>{}) throw std::domain_error("integrate: default value must be 0");
  std::complex<double> total{};
  for (const auto& piece : f.pieces()) total += piece.value * piece.region.measure().get_d();
  return total;
}

StepFunction constant(Prime p, Rational value) { return StepFunction(p, std::move(value)); }

StepFunction indicator(const Region& region, Rational value) {
  return StepFunction::from_disjoint(region.prime(), {{region, std::move(value)}}, Rational(0));
}

StepFunction operator+(const StepFunction& f, const StepFunction& g) {
  return combine(f, g, [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

StepFunction operator-(const StepFunction& f, const StepFunction& g) {
  return combine(f, g, [](const Rational& x, const Rational& y) { return Rational(x - y); });
}

StepFunction operator*(const StepFunction& f, const StepFunction& g) {
  return combine(f, g, [](const Rational& x, const Rational& y) { return Rational(x * y); });
}

StepFunction operator*(const Rational& scale, const StepFunction& f) {
  return f.map([&](const Rational& x) { return Rational(scale * x); });
}

StepFunction abs(const StepFunction& f) {
  return f.map([](const Rational& x) { return Rational(::abs(x)); });
}

}  // namespace afflab
