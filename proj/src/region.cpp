#include "afflab/region.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "afflab/errors.hpp"

namespace afflab {

namespace {

void require_same_prime(const Ball& a, const Ball& b) {
  if (a.prime() != b.prime()) {
    throw PrimeMismatch("balls over p=" + std::to_string(a.prime().value()) + " and p=" +
                        std::to_string(b.prime().value()));
  }
}

// Drop balls nested inside (or equal to) another ball of the list.
std::vector<Ball> keep_maximal(std::vector<Ball> balls) {
  std::sort(balls.begin(), balls.end(), [](const Ball& a, const Ball& b) { return a > b; });
  std::vector<Ball> kept;
  for (auto& ball : balls) {
    bool nested = std::any_of(kept.begin(), kept.end(), [&](const Ball& k) { return within(ball, k); });
    if (!nested) kept.push_back(std::move(ball));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Rational excluded_measure(const std::vector<Ball>& exclusions) {
  Rational total = 0;
  for (const auto& e : exclusions) total += e.measure();
  return total;
}

}  // namespace

Ball::Ball(const Rational& center, long level, Prime p)
    : center_(residue_representative(center, level, p)), level_(level), prime_(p) {}

bool Ball::contains(const Rational& x) const {
  Rational diff = x - center_;
  auto v = valuation(diff, prime_);
  return !v || *v >= -level_;
}

BallRelation relate(const Ball& first, const Ball& second) {
  require_same_prime(first, second);
  if (first.level() == second.level()) {
    return first.center() == second.center() ? BallRelation::equal : BallRelation::disjoint;
  }
  if (first.level() < second.level()) {
    return second.contains(first.center()) ? BallRelation::first_inside : BallRelation::disjoint;
  }
  return first.contains(second.center()) ? BallRelation::second_inside : BallRelation::disjoint;
}

std::vector<Ball> split(const Ball& ball) {
  std::vector<Ball> children;
  const auto p = ball.prime();
  children.reserve(p.uvalue());
  Rational step = prime_power(p, -ball.level());
  for (long d = 0; d < p.value(); ++d) {
    children.emplace_back(ball.center() + d * step, ball.level() - 1, p);
  }
  return children;
}

Ball join(const Ball& first, const Ball& second) {
  require_same_prime(first, second);
  long level = std::max(first.level(), second.level());
  if (auto v = valuation(Rational(first.center() - second.center()), first.prime())) {
    level = std::max(level, -*v);
  }
  return Ball(first.center(), level, first.prime());
}

bool within(const Ball& inner, const Ball& outer) {
  require_same_prime(inner, outer);
  return inner.level() <= outer.level() && outer.contains(inner.center());
}

Ball affine_image(const Ball& ball, const Rational& a, const Rational& b) {
  if (sgn(a) == 0) throw std::domain_error("affine_image: zero scale");
  Rational image_center = (ball.center() + b) / a;
  return Ball(image_center, ball.level() + *valuation(a, ball.prime()), ball.prime());
}

// --- Region -----------------------------------------------------------------

Region::Region(Ball base) : base_(std::move(base)) {}

Region::Region(Ball base, std::vector<Ball> exclusions, Unchecked)
    : base_(std::move(base)), exclusions_(std::move(exclusions)) {
  std::sort(exclusions_.begin(), exclusions_.end());
}

Region::Region(Ball base, std::vector<Ball> exclusions) : base_(std::move(base)) {
  for (const auto& e : exclusions) {
    if (relate(e, base_) != BallRelation::first_inside) {
      throw std::invalid_argument("region exclusion is not a proper sub-ball of the base");
    }
  }
  std::sort(exclusions.begin(), exclusions.end());
  for (std::size_t i = 0; i < exclusions.size(); ++i) {
    for (std::size_t j = i + 1; j < exclusions.size(); ++j) {
      if (relate(exclusions[i], exclusions[j]) != BallRelation::disjoint) {
        throw std::invalid_argument("region exclusions overlap");
      }
    }
  }
  if (excluded_measure(exclusions) >= base_.measure()) {
    throw std::invalid_argument("region exclusions cover the base ball");
  }
  exclusions_ = std::move(exclusions);
}

std::optional<Region> Region::make(Ball base, std::vector<Ball> exclusions) {
  exclusions = keep_maximal(std::move(exclusions));
  if (excluded_measure(exclusions) >= base.measure()) return std::nullopt;
  return Region(std::move(base), std::move(exclusions), Unchecked{});
}

bool Region::contains(const Rational& x) const {
  if (!base_.contains(x)) return false;
  return std::none_of(exclusions_.begin(), exclusions_.end(), [&](const Ball& e) { return e.contains(x); });
}

Rational Region::measure() const { return base_.measure() - excluded_measure(exclusions_); }

long Region::finest_level() const {
  long level = base_.level();
  for (const auto& e : exclusions_) level = std::min(level, e.level());
  return level;
}

std::strong_ordering operator<=>(const Region& a, const Region& b) {
  if (auto c = a.base_ <=> b.base_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.exclusions_.begin(), a.exclusions_.end(),
                                                b.exclusions_.begin(), b.exclusions_.end());
}

Rational measure(const Region& region) { return region.measure(); }

std::optional<Region> intersect(const Region& first, const Region& second) {
  auto relation = relate(first.base(), second.base());
  if (relation == BallRelation::disjoint) return std::nullopt;
  const Region& inner = relation == BallRelation::second_inside ? second : first;
  const Region& outer = &inner == &first ? second : first;

  std::vector<Ball> exclusions(inner.exclusions().begin(), inner.exclusions().end());
  for (const auto& e : outer.exclusions()) {
    switch (relate(e, inner.base())) {
      case BallRelation::equal:
      case BallRelation::second_inside:
        return std::nullopt;
      case BallRelation::first_inside:
        exclusions.push_back(e);
        break;
      case BallRelation::disjoint:
        break;
    }
  }
  return Region::make(inner.base(), std::move(exclusions));
}

std::vector<Region> subtract(const Region& first, const Region& second) {
  std::vector<Region> out;
  // first \ base(second)
  switch (relate(first.base(), second.base())) {
    case BallRelation::disjoint:
      return {first};
    case BallRelation::equal:
    case BallRelation::first_inside:
      break;
    case BallRelation::second_inside: {
      const Ball& hole = second.base();
      bool already = std::any_of(first.exclusions().begin(), first.exclusions().end(),
                                 [&](const Ball& e) { return within(hole, e); });
      if (already) return {first};
      std::vector<Ball> exclusions;
      for (const auto& e : first.exclusions()) {
        if (!within(e, hole)) exclusions.push_back(e);
      }
      exclusions.push_back(hole);
      if (auto r = Region::make(first.base(), std::move(exclusions))) out.push_back(std::move(*r));
      break;
    }
  }
  // plus the parts of first that sit inside the holes of second
  for (const auto& hole : second.exclusions()) {
    if (auto r = intersect(first, Region(hole))) out.push_back(std::move(*r));
  }
  return out;
}

Region affine_image(const Region& region, const Rational& a, const Rational& b) {
  std::vector<Ball> exclusions;
  exclusions.reserve(region.exclusions().size());
  for (const auto& e : region.exclusions()) exclusions.push_back(affine_image(e, a, b));
  return *Region::make(affine_image(region.base(), a, b), std::move(exclusions));
}

Region affine_preimage(const Region& region, const Rational& a, const Rational& b) {
  if (sgn(a) == 0) throw std::domain_error("affine_preimage: zero scale");
  // y = (x + b) / a  <=>  x = a y - b = (y - b / a) / (1 / a)
  return affine_image(region, Rational(1 / a), Rational(-b / a));
}

// --- RegionSet --------------------------------------------------------------

RegionSet::RegionSet(Region region) { parts_.push_back(std::move(region)); }

RegionSet::RegionSet(std::vector<Region> disjoint_parts) : parts_(std::move(disjoint_parts)) {}

bool RegionSet::contains(const Rational& x) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const Region& r) { return r.contains(x); });
}

Rational RegionSet::measure() const {
  Rational total = 0;
  for (const auto& r : parts_) total += r.measure();
  return total;
}

std::optional<long> RegionSet::finest_level() const {
  std::optional<long> level;
  for (const auto& r : parts_) level = std::min(level.value_or(r.finest_level()), r.finest_level());
  return level;
}

RegionSet RegionSet::intersect(const RegionSet& other) const {
  std::vector<Region> out;
  for (const auto& a : parts_) {
    for (const auto& b : other.parts_) {
      if (auto r = afflab::intersect(a, b)) out.push_back(std::move(*r));
    }
  }
  return RegionSet(std::move(out));
}

RegionSet RegionSet::minus(const RegionSet& other) const {
  std::vector<Region> current = parts_;
  for (const auto& cut : other.parts_) {
    std::vector<Region> next;
    for (const auto& piece : current) {
      auto rest = subtract(piece, cut);
      next.insert(next.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return RegionSet(std::move(current));
}

RegionSet RegionSet::unite(const RegionSet& other) const {
  auto extra = other.minus(*this);
  std::vector<Region> out = parts_;
  out.insert(out.end(), extra.parts_.begin(), extra.parts_.end());
  return RegionSet(std::move(out));
}

bool RegionSet::subset_of(const RegionSet& other) const { return minus(other).empty(); }

bool RegionSet::same_set(const RegionSet& other) const { return subset_of(other) && other.subset_of(*this); }

bool RegionSet::disjoint_from(const RegionSet& other) const { return intersect(other).empty(); }

std::optional<Ball> RegionSet::hull() const {
  if (parts_.empty()) return std::nullopt;
  Ball current = parts_.front().base();
  for (const auto& r : parts_) current = join(current, r.base());
  // Descend while the set lives inside a single child.
  while (true) {
    std::optional<Ball> only;
    int occupied = 0;
    for (const auto& child : split(current)) {
      if (!intersect(RegionSet(Region(child))).empty()) {
        ++occupied;
        only = child;
        if (occupied > 1) break;
      }
    }
    if (occupied != 1) return current;
    current = *only;
  }
}

namespace {

void collect_holes(const RegionSet& set, const Ball& ball, std::vector<Ball>& holes) {
  Rational covered = set.intersect(RegionSet(Region(ball))).measure();
  if (sgn(covered) == 0) {
    holes.push_back(ball);
    return;
  }
  if (covered == ball.measure()) return;
  for (const auto& child : split(ball)) collect_holes(set, child, holes);
}

}  // namespace

RegionSet RegionSet::canonical() const {
  auto h = hull();
  if (!h) return {};
  std::vector<Ball> holes;
  Rational covered = measure();
  if (covered != h->measure()) {
    for (const auto& child : split(*h)) collect_holes(*this, child, holes);
  }
  return RegionSet(Region(*h, std::move(holes)));
}

std::optional<Region> RegionSet::as_region() const {
  auto c = canonical();
  if (c.empty()) return std::nullopt;
  return c.parts_.front();
}

}  // namespace afflab
