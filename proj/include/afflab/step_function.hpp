#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "afflab/errors.hpp"
#include "afflab/rational.hpp"
#include "afflab/region.hpp"

namespace afflab {

/// Strict weak order used to group equal values when normalizing.
template <class V>
struct ValueLess {
  bool operator()(const V& a, const V& b) const { return a < b; }
};

template <>
struct ValueLess<std::complex<double>> {
  bool operator()(const std::complex<double>& a, const std::complex<double>& b) const {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  }
};

/// Constant coefficients (a, b) of an affine map x -> (x + b) / a on one cell.
struct Coeffs {
  Rational a{1};
  Rational b{0};

  friend bool operator==(const Coeffs&, const Coeffs&) = default;
  friend bool operator<(const Coeffs& l, const Coeffs& r) {
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  }
};

/// A region on which an affine element has constant, non-identity coefficients.
struct AffineCell {
  Region region;
  Coeffs coeffs;
};

/// Piecewise-constant function on Q_p: disjoint pieces plus a default value
/// taken everywhere else. Normalized: one canonical region per distinct
/// non-default value, pieces ordered by region.
template <class V>
class BasicStepFunction {
 public:
  using value_type = V;

  struct Piece {
    Region region;
    V value;

    friend bool operator==(const Piece&, const Piece&) = default;
  };

  BasicStepFunction(Prime p, V default_value) : prime_(p), default_(std::move(default_value)) {}

  /// Pieces may be nested balls/regions: a piece with a strictly smaller base ball
  /// overrides the larger one. Two pieces on the same base ball that overlap with
  /// different values throw InconsistentPieces.
  static BasicStepFunction normalize(Prime p, std::vector<Piece> raw, V default_value) {
    std::stable_sort(raw.begin(), raw.end(), [](const Piece& l, const Piece& r) { return l.region.base() < r.region.base(); });
    std::vector<Piece> disjoint;
    RegionSet covered;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const Piece& piece = raw[i];
      if (piece.region.prime() != p) throw PrimeMismatch("step piece over a different prime");
      for (std::size_t j = 0; j < i; ++j) {
        if (raw[j].region.base() == piece.region.base() && !(raw[j].value == piece.value) &&
            intersect(raw[j].region, piece.region)) {
          throw InconsistentPieces("overlapping pieces on the same ball carry different values");
        }
      }
      RegionSet fresh = RegionSet(piece.region).minus(covered);
      for (const auto& part : fresh.parts()) disjoint.push_back(Piece{part, piece.value});
      covered = RegionSet(piece.region).unite(covered);
    }
    return from_disjoint(p, std::move(disjoint), std::move(default_value));
  }

  /// Pieces must be pairwise disjoint; equal values are merged.
  static BasicStepFunction from_disjoint(Prime p, std::vector<Piece> pieces, V default_value) {
    std::map<V, std::vector<Region>, ValueLess<V>> by_value;
    for (auto& piece : pieces) {
      if (piece.value == default_value) continue;
      by_value[piece.value].push_back(std::move(piece.region));
    }
    BasicStepFunction result(p, std::move(default_value));
    for (auto& [value, regions] : by_value) {
      if (auto region = RegionSet(std::move(regions)).as_region()) {
        result.pieces_.push_back(Piece{std::move(*region), value});
      }
    }
    std::sort(result.pieces_.begin(), result.pieces_.end(),
              [](const Piece& l, const Piece& r) { return l.region < r.region; });
    return result;
  }

  static BasicStepFunction indicator(const RegionSet& set, V inside, V outside) {
    if (set.empty()) throw std::invalid_argument("indicator of an empty set needs an explicit prime");
    std::vector<Piece> pieces;
    for (const auto& part : set.parts()) pieces.push_back(Piece{part, inside});
    return from_disjoint(set.parts().front().prime(), std::move(pieces), std::move(outside));
  }

  Prime prime() const noexcept { return prime_; }
  const V& default_value() const noexcept { return default_; }
  std::span<const Piece> pieces() const noexcept { return pieces_; }
  bool is_constant() const noexcept { return pieces_.empty(); }

  const V& evaluate(const Rational& x) const {
    for (const auto& piece : pieces_) {
      if (piece.region.contains(x)) return piece.value;
    }
    return default_;
  }
  const V& operator()(const Rational& x) const { return evaluate(x); }

  /// Where the function differs from its default, canonicalized.
  RegionSet support() const {
    std::vector<Region> parts;
    for (const auto& piece : pieces_) parts.push_back(piece.region);
    return RegionSet(std::move(parts)).canonical();
  }

  /// Finest ball level appearing in the pieces; nullopt for constants.
  std::optional<long> finest_level() const {
    std::optional<long> level;
    for (const auto& piece : pieces_) {
      long l = piece.region.finest_level();
      level = level ? std::min(*level, l) : l;
    }
    return level;
  }

  template <class Op>
  auto map(Op op) const -> BasicStepFunction<std::decay_t<std::invoke_result_t<Op, const V&>>> {
    using W = std::decay_t<std::invoke_result_t<Op, const V&>>;
    std::vector<typename BasicStepFunction<W>::Piece> out;
    out.reserve(pieces_.size());
    for (const auto& piece : pieces_) out.push_back({piece.region, op(piece.value)});
    return BasicStepFunction<W>::from_disjoint(prime_, std::move(out), op(default_));
  }

  friend bool operator==(const BasicStepFunction&, const BasicStepFunction&) = default;

 private:
  Prime prime_;
  std::vector<Piece> pieces_;
  V default_;
};

using StepFunction = BasicStepFunction<Rational>;
using ComplexStepFunction = BasicStepFunction<std::complex<double>>;
using CoeffFunction = BasicStepFunction<Coeffs>;

/// Pointwise op on the common refinement; the default becomes op(defaults).
template <class V, class W, class Op>
auto combine(const BasicStepFunction<V>& f, const BasicStepFunction<W>& g, Op op)
    -> BasicStepFunction<std::decay_t<std::invoke_result_t<Op, const V&, const W&>>> {
  using R = std::decay_t<std::invoke_result_t<Op, const V&, const W&>>;
  using Out = BasicStepFunction<R>;
  if (f.prime() != g.prime()) throw PrimeMismatch("combine: step functions over different primes");
  std::vector<typename Out::Piece> out;
  RegionSet f_support;
  RegionSet g_support;
  for (const auto& gp : g.pieces()) g_support = RegionSet(gp.region).unite(g_support);
  for (const auto& fp : f.pieces()) {
    RegionSet own(fp.region);
    for (const auto& gp : g.pieces()) {
      if (auto common = intersect(fp.region, gp.region)) out.push_back({*common, op(fp.value, gp.value)});
    }
    RegionSet alone = own.minus(g_support);
    for (const auto& part : alone.parts()) out.push_back({part, op(fp.value, g.default_value())});
    f_support = own.unite(f_support);
  }
  for (const auto& gp : g.pieces()) {
    RegionSet alone = RegionSet(gp.region).minus(f_support);
    for (const auto& part : alone.parts()) {
      out.push_back({part, op(f.default_value(), gp.value)});
    }
  }
  return Out::from_disjoint(f.prime(), std::move(out), op(f.default_value(), g.default_value()));
}

/// (gf)(x) = f(g(x) x) for the element whose non-identity cells are given.
/// Outside the cells the element acts as the identity, so gf = f there.
template <class V>
BasicStepFunction<V> pullback(const BasicStepFunction<V>& f, std::span<const AffineCell> cells) {
  using Piece = typename BasicStepFunction<V>::Piece;
  std::vector<Piece> out;
  RegionSet moved;
  for (const auto& cell : cells) {
    RegionSet rest(cell.region);
    for (const auto& piece : f.pieces()) {
      Region pre = affine_preimage(piece.region, cell.coeffs.a, cell.coeffs.b);
      if (auto part = intersect(cell.region, pre)) {
        out.push_back(Piece{*part, piece.value});
        rest = rest.minus(RegionSet(*part));
      }
    }
    for (const auto& part : rest.parts()) out.push_back(Piece{part, f.default_value()});
    moved = RegionSet(cell.region).unite(moved);
  }
  for (const auto& piece : f.pieces()) {
    RegionSet fixed = RegionSet(piece.region).minus(moved);
    for (const auto& part : fixed.parts()) out.push_back(Piece{part, piece.value});
  }
  return BasicStepFunction<V>::from_disjoint(f.prime(), std::move(out), f.default_value());
}

/// Exact integral against Haar measure; requires default 0.
Rational integrate(const StepFunction& f);
std::complex<double> integrate(const ComplexStepFunction& f);

StepFunction constant(Prime p, Rational value);

/// value * 1_region, default 0.
StepFunction indicator(const Region& region, Rational value = Rational(1));

StepFunction operator+(const StepFunction& f, const StepFunction& g);
StepFunction operator-(const StepFunction& f, const StepFunction& g);
StepFunction operator*(const StepFunction& f, const StepFunction& g);
StepFunction operator*(const Rational& scale, const StepFunction& f);
StepFunction abs(const StepFunction& f);

}  // namespace afflab
