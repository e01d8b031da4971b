#include "afflab/affine.hpp"

#include <algorithm>
#include <stdexcept>

#include "afflab/errors.hpp"

namespace afflab {

namespace {

CoeffFunction coefficients(const AffineElement& g) {
  std::vector<CoeffFunction::Piece> pieces;
  for (const auto& cell : g.cells()) pieces.push_back({cell.region, cell.coeffs});
  return CoeffFunction::from_disjoint(g.prime(), std::move(pieces), Coeffs{});
}

AffineElement from_coefficients(const CoeffFunction& c) {
  return AffineElement(c.map([](const Coeffs& k) { return k.a; }), c.map([](const Coeffs& k) { return k.b; }));
}

}  // namespace

AffineElement::AffineElement(StepFunction a, StepFunction b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.prime() != b_.prime()) throw PrimeMismatch("affine element: a and b over different primes");
  if (a_.default_value() != 1) throw std::invalid_argument("affine element: a must default to 1");
  if (sgn(b_.default_value()) != 0) throw std::invalid_argument("affine element: b must default to 0");
  for (const auto& piece : a_.pieces()) {
    if (sgn(piece.value) == 0) throw std::invalid_argument("affine element: a takes the value 0");
  }
  auto coeffs = combine(a_, b_, [](const Rational& a, const Rational& b) { return Coeffs{a, b}; });
  for (const auto& piece : coeffs.pieces()) cells_.push_back(AffineCell{piece.region, piece.value});
}

AffineElement AffineElement::identity(Prime p) { return AffineElement(constant(p, 1), constant(p, 0)); }

AffineElement AffineElement::translation(const Region& region, const Rational& shift) {
  return AffineElement(constant(region.prime(), 1), indicator(region, shift));
}

AffineElement AffineElement::from_cells(Prime p, std::span<const AffineCell> cells) {
  std::vector<CoeffFunction::Piece> pieces;
  for (const auto& cell : cells) pieces.push_back({cell.region, cell.coeffs});
  return from_coefficients(CoeffFunction::from_disjoint(p, std::move(pieces), Coeffs{}));
}

std::optional<long> AffineElement::finest_level() const {
  std::optional<long> level;
  for (const auto& cell : cells_) {
    long l = std::min(cell.region.finest_level(),
                      affine_image(cell.region, cell.coeffs.a, cell.coeffs.b).finest_level());
    level = level ? std::min(*level, l) : l;
  }
  return level;
}

long AffineElement::max_scale_valuation() const {
  long worst = 0;
  for (const auto& cell : cells_) worst = std::max(worst, *valuation(cell.coeffs.a, prime()));
  return worst;
}

std::pair<Rational, Rational> section(const AffineElement& g, const Rational& x) {
  return {g.a().evaluate(x), g.b().evaluate(x)};
}

Rational act_point(const AffineElement& g, const Rational& x) {
  for (const auto& cell : g.cells()) {
    if (cell.region.contains(x)) return (x + cell.coeffs.b) / cell.coeffs.a;
  }
  return x;
}

AffineElement product_pointwise(const AffineElement& g2, const AffineElement& g1) {
  auto c = combine(coefficients(g2), coefficients(g1), [](const Coeffs& second, const Coeffs& first) {
    return Coeffs{first.a * second.a, first.b + first.a * second.b};
  });
  return from_coefficients(c);
}

AffineElement product_motion(const AffineElement& g2, const AffineElement& g1) {
  if (g2.prime() != g1.prime()) throw PrimeMismatch("product_motion: prime mismatch");
  // Outer coefficients are read at the moved point g1 x.
  auto outer = pullback(coefficients(g2), g1.cells());
  auto c = combine(coefficients(g1), outer, [](const Coeffs& first, const Coeffs& second) {
    return Coeffs{first.a * second.a, first.b + first.a * second.b};
  });
  return from_coefficients(c);
}

AffineElement inverse_pointwise(const AffineElement& g) {
  return from_coefficients(coefficients(g).map([](const Coeffs& c) { return Coeffs{1 / c.a, -c.b / c.a}; }));
}

AffineElement inverse_motion(const AffineElement& g) {
  auto certificate = is_bijective(g);
  if (!certificate.verdict) throw NonBijectiveElement("inverse_motion: point map is not a bijection");
  std::vector<AffineCell> cells;
  for (std::size_t k = 0; k < certificate.images.size(); ++k) {
    const auto& c = certificate.non_trivial_pieces[k].coeffs;
    cells.push_back(AffineCell{certificate.images[k], Coeffs{1 / c.a, -c.b / c.a}});
  }
  return AffineElement::from_cells(g.prime(), cells);
}

BijectivityCertificate is_bijective(const AffineElement& g) {
  BijectivityCertificate cert;
  cert.non_trivial_pieces.assign(g.cells().begin(), g.cells().end());
  for (const auto& cell : cert.non_trivial_pieces) {
    cert.images.push_back(affine_image(cell.region, cell.coeffs.a, cell.coeffs.b));
  }
  for (std::size_t i = 0; i < cert.images.size() && !cert.overlapping; ++i) {
    for (std::size_t j = i + 1; j < cert.images.size(); ++j) {
      if (intersect(cert.images[i], cert.images[j])) {
        cert.overlapping = std::make_pair(i, j);
        break;
      }
    }
  }
  if (cert.overlapping) return cert;
  std::vector<Region> sources;
  for (const auto& cell : cert.non_trivial_pieces) sources.push_back(cell.region);
  RegionSet moved(std::move(sources));
  RegionSet hit(cert.images);
  cert.uncovered = hit.minus(moved);
  if (cert.uncovered.empty()) cert.uncovered = moved.minus(hit);
  cert.verdict = cert.uncovered.empty();
  return cert;
}

StepFunction pushforward_density(const AffineElement& g) {
  std::vector<StepFunction::Piece> vacated;
  for (const auto& cell : g.cells()) vacated.push_back({cell.region, Rational(0)});
  StepFunction rho = StepFunction::from_disjoint(g.prime(), std::move(vacated), Rational(1));
  // Overlapping images add up.
  for (const auto& cell : g.cells()) {
    rho = rho + indicator(affine_image(cell.region, cell.coeffs.a, cell.coeffs.b), padic_norm(cell.coeffs.a, g.prime()));
  }
  return rho;
}

Rational mass_defect(const AffineElement& g) {
  return integrate(constant(g.prime(), 1) - pushforward_density(g));
}

Rational rn_integrability(const AffineElement& g) {
  return integrate(abs(pushforward_density(g) - constant(g.prime(), 1)));
}

}  // namespace afflab
