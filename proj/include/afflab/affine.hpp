#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "afflab/rational.hpp"
#include "afflab/region.hpp"
#include "afflab/step_function.hpp"

namespace afflab {

/// Element g = (a, b) of the step-coefficient affine group, acting on points by
/// x -> (x + b(x)) / a(x). a has default 1 and no zero values, b has default 0.
class AffineElement {
 public:
  /// Throws std::invalid_argument on a zero value of a or wrong defaults.
  AffineElement(StepFunction a, StepFunction b);

  static AffineElement identity(Prime p);
  /// (1, shift * 1_region).
  static AffineElement translation(const Region& region, const Rational& shift);
  /// Constant coefficients on each listed region, identity elsewhere. Regions must be disjoint.
  static AffineElement from_cells(Prime p, std::span<const AffineCell> cells);

  Prime prime() const noexcept { return a_.prime(); }
  const StepFunction& a() const noexcept { return a_; }
  const StepFunction& b() const noexcept { return b_; }

  /// Maximal regions with constant coefficients other than (1, 0).
  std::span<const AffineCell> cells() const noexcept { return cells_; }
  bool is_identity() const noexcept { return cells_.empty(); }

  /// Finest ball level among cells and their images.
  std::optional<long> finest_level() const;
  /// Largest v_p(a) over cells, floored at 0: how many digits a point can lose.
  long max_scale_valuation() const;

  friend bool operator==(const AffineElement& l, const AffineElement& r) { return l.a_ == r.a_ && l.b_ == r.b_; }

 private:
  StepFunction a_;
  StepFunction b_;
  std::vector<AffineCell> cells_;
};

/// The section g(x) = (a(x), b(x)).
std::pair<Rational, Rational> section(const AffineElement& g, const Rational& x);

/// g x = (x + b(x)) / a(x).
Rational act_point(const AffineElement& g, const Rational& x);

/// Coefficient-wise product (a1 a2, b1 + a1 b2) evaluated at the same point.
AffineElement product_pointwise(const AffineElement& g2, const AffineElement& g1);

/// Composite point map: act_point(result, x) == act_point(g2, act_point(g1, x)).
AffineElement product_motion(const AffineElement& g2, const AffineElement& g1);

/// (1/a, -b/a) pointwise; the inverse for product_pointwise.
AffineElement inverse_pointwise(const AffineElement& g);

/// Inverse point map. Throws NonBijectiveElement unless is_bijective(g).
AffineElement inverse_motion(const AffineElement& g);

struct BijectivityCertificate {
  bool verdict = false;
  std::vector<AffineCell> non_trivial_pieces;
  std::vector<Region> images;
  /// Indices of two overlapping images, if any.
  std::optional<std::pair<std::size_t, std::size_t>> overlapping;
  /// Part of one side of the cover equation missing from the other.
  RegionSet uncovered;
};

BijectivityCertificate is_bijective(const AffineElement& g);

/// Density of g^* m against m: sum_k |a_k|_p 1_{C_k} plus 1 off the moved cells.
StepFunction pushforward_density(const AffineElement& g);

/// Integral of (1 - rho_g).
Rational mass_defect(const AffineElement& g);

/// Integral of |rho_g - 1|.
Rational rn_integrability(const AffineElement& g);

/// Pullback through the element's point map: (gf)(x) = f(g x).
template <class V>
BasicStepFunction<V> pullback(const BasicStepFunction<V>& f, const AffineElement& g) {
  if (f.prime() != g.prime()) throw PrimeMismatch("pullback: prime mismatch");
  return pullback(f, g.cells());
}

}  // namespace afflab
