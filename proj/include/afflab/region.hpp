#pragma once

#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "afflab/rational.hpp"

namespace afflab {

/// Closed ball {x : v_p(x - center) >= -level} of radius p^level.
/// The center is stored in canonical (truncated) form, so equal balls compare equal.
class Ball {
 public:
  Ball(const Rational& center, long level, Prime p);

  const Rational& center() const noexcept { return center_; }
  long level() const noexcept { return level_; }
  Prime prime() const noexcept { return prime_; }

  bool contains(const Rational& x) const;
  /// Haar measure, normalized so the unit ball has measure 1.
  Rational measure() const { return prime_power(prime_, level_); }
  Ball parent() const { return Ball(center_, level_ + 1, prime_); }

  friend bool operator==(const Ball& a, const Ball& b) {
    return a.level_ == b.level_ && a.center_ == b.center_ && a.prime_ == b.prime_;
  }
  friend std::strong_ordering operator<=>(const Ball& a, const Ball& b) {
    if (auto c = a.level_ <=> b.level_; c != 0) return c;
    return compare(a.center_, b.center_);
  }

 private:
  Rational center_;
  long level_;
  Prime prime_;
};

enum class BallRelation { disjoint, equal, first_inside, second_inside };

/// Exact ultrametric classification; balls never partially overlap.
BallRelation relate(const Ball& first, const Ball& second);

/// The p children of level k-1 whose disjoint union is the ball.
std::vector<Ball> split(const Ball& ball);

/// Smallest ball containing both.
Ball join(const Ball& first, const Ball& second);

/// True iff inner is a subset of outer (equal allowed).
bool within(const Ball& inner, const Ball& outer);

/// Image of the ball under x -> (x + b) / a. Throws std::domain_error for a == 0.
Ball affine_image(const Ball& ball, const Rational& a, const Rational& b);

/// A ball with finitely many pairwise-disjoint proper sub-balls removed.
/// A Region always has positive measure; the empty set is an empty RegionSet.
class Region {
 public:
  explicit Region(Ball base);
  /// Throws std::invalid_argument when an exclusion is not a proper sub-ball,
  /// exclusions overlap, or they cover the whole base.
  Region(Ball base, std::vector<Ball> exclusions);

  /// Like the checked constructor but returns nullopt when the exclusions cover the base.
  static std::optional<Region> make(Ball base, std::vector<Ball> exclusions);

  const Ball& base() const noexcept { return base_; }
  std::span<const Ball> exclusions() const noexcept { return exclusions_; }
  bool is_ball() const noexcept { return exclusions_.empty(); }
  Prime prime() const noexcept { return base_.prime(); }

  bool contains(const Rational& x) const;
  Rational measure() const;
  /// Smallest ball level among base and exclusions.
  long finest_level() const;

  friend bool operator==(const Region&, const Region&) = default;
  friend std::strong_ordering operator<=>(const Region& a, const Region& b);

 private:
  struct Unchecked {};
  Region(Ball base, std::vector<Ball> exclusions, Unchecked);

  Ball base_;
  std::vector<Ball> exclusions_;
};

Rational measure(const Region& region);

std::optional<Region> intersect(const Region& first, const Region& second);

/// first \ second as disjoint regions.
std::vector<Region> subtract(const Region& first, const Region& second);

/// Image under x -> (x + b) / a; affine maps send balls to balls, so holes map to holes.
Region affine_image(const Region& region, const Rational& a, const Rational& b);

/// Preimage {x : (x + b) / a in region}.
Region affine_preimage(const Region& region, const Rational& a, const Rational& b);

/// Finite disjoint union of regions: the set algebra used by step functions.
class RegionSet {
 public:
  RegionSet() = default;
  RegionSet(Region region);  // NOLINT(google-explicit-constructor)
  /// The parts must already be pairwise disjoint.
  explicit RegionSet(std::vector<Region> disjoint_parts);

  std::span<const Region> parts() const noexcept { return parts_; }
  bool empty() const noexcept { return parts_.empty(); }
  bool contains(const Rational& x) const;
  Rational measure() const;
  std::optional<long> finest_level() const;

  RegionSet intersect(const RegionSet& other) const;
  RegionSet minus(const RegionSet& other) const;
  RegionSet unite(const RegionSet& other) const;

  bool subset_of(const RegionSet& other) const;
  bool same_set(const RegionSet& other) const;
  bool disjoint_from(const RegionSet& other) const;

  /// Smallest ball containing the set; nullopt when empty.
  std::optional<Ball> hull() const;

  /// Unique representation: empty, or one region (hull minus the maximal
  /// balls of the hull that miss the set).
  RegionSet canonical() const;

  /// The canonical single region; nullopt when empty.
  std::optional<Region> as_region() const;

 private:
  std::vector<Region> parts_;
};

}  // namespace afflab
