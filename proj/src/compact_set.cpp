#include "opfield/compact_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opfield {

namespace {

void require_nonempty(const CompactSet& f, const char* op) {
  if (f.empty()) throw std::invalid_argument(std::string(op) + ": no spectrum (empty set)");
}

}  // namespace

CompactSet CompactSet::from_intervals(std::vector<Interval> parts) {
  for (const auto& iv : parts) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument("CompactSet: non-finite endpoint");
    if (iv.hi < iv.lo) throw std::invalid_argument("CompactSet: interval with hi < lo");
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) {
              return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
            });
  CompactSet out;
  for (const auto& iv : parts) {
    if (!out.parts_.empty() && iv.lo <= out.parts_.back().hi) {
      out.parts_.back().hi = std::max(out.parts_.back().hi, iv.hi);
    } else {
      out.parts_.push_back(iv);
    }
  }
  return out;
}

CompactSet CompactSet::from_points(const std::vector<Scalar>& points, Scalar merge_tol) {
  if (merge_tol < 0) throw std::invalid_argument("from_points: merge_tol must be >= 0");
  CompactSet out;
  if (points.empty()) return out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if (points[i + 1] < points[i])
      throw std::invalid_argument("from_points: points not sorted ascending");
  for (Scalar x : points)
    if (!std::isfinite(x)) throw std::invalid_argument("from_points: non-finite point");

  Interval cur{points.front(), points.front()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] - cur.hi <= merge_tol) {
      cur.hi = points[i];
    } else {
      out.parts_.push_back(cur);
      cur = Interval{points[i], points[i]};
    }
  }
  out.parts_.push_back(cur);
  return out;
}

CompactSet CompactSet::interval(Scalar lo, Scalar hi) {
  return from_intervals({Interval{lo, hi}});
}

Scalar CompactSet::min() const {
  require_nonempty(*this, "min");
  return parts_.front().lo;
}

Scalar CompactSet::max() const {
  require_nonempty(*this, "max");
  return parts_.back().hi;
}

bool CompactSet::contains(Scalar x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](Scalar v, const Interval& iv) { return v < iv.lo; });
  if (it == parts_.begin()) return false;
  --it;
  return x <= it->hi;
}

bool CompactSet::equals(const CompactSet& other, Scalar tol) const {
  if (parts_.size() != other.parts_.size()) return false;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (std::abs(parts_[i].lo - other.parts_[i].lo) > tol) return false;
    if (std::abs(parts_[i].hi - other.parts_[i].hi) > tol) return false;
  }
  return true;
}

std::vector<Gap> gaps(const CompactSet& f) {
  require_nonempty(f, "gaps");
  std::vector<Gap> out;
  const auto& parts = f.intervals();
  out.reserve(parts.size() > 0 ? parts.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i)
    out.push_back(Gap{parts[i].hi, parts[i + 1].lo});
  return out;
}

std::pair<Scalar, Scalar> edges(const CompactSet& f) {
  require_nonempty(f, "edges");
  return {f.min(), f.max()};
}

Scalar dist_point(Scalar x, const CompactSet& f) {
  require_nonempty(f, "dist_point");
  const auto& parts = f.intervals();
  auto it = std::upper_bound(parts.begin(), parts.end(), x,
                             [](Scalar v, const Interval& iv) { return v < iv.lo; });
  Scalar best = std::numeric_limits<Scalar>::infinity();
  if (it != parts.end()) best = std::min(best, it->lo - x);
  if (it != parts.begin()) {
    --it;
    if (x <= it->hi) return 0;
    best = std::min(best, x - it->hi);
  }
  return best;
}

namespace {

// One-sided Hausdorff sup: returns {delta(f, g), witness point in f}.
// The supremum of dist(., g) over f is attained at an endpoint of f or at a
// gap midpoint of g lying in the interior of f.
std::pair<Scalar, Scalar> directed_hausdorff(const CompactSet& f, const CompactSet& g) {
  Scalar best = -1, arg = 0;
  auto consider = [&](Scalar x) {
    Scalar d = dist_point(x, g);
    if (d > best) {
      best = d;
      arg = x;
    }
  };
  for (const auto& iv : f.intervals()) {
    consider(iv.lo);
    consider(iv.hi);
  }
  const auto& gp = g.intervals();
  for (std::size_t i = 0; i + 1 < gp.size(); ++i) {
    Scalar mid = 0.5 * (gp[i].hi + gp[i + 1].lo);
    if (f.contains(mid)) consider(mid);
  }
  return {best, arg};
}

}  // namespace

Scalar hausdorff(const CompactSet& f, const CompactSet& g) {
  require_nonempty(f, "hausdorff");
  require_nonempty(g, "hausdorff");
  return std::max(directed_hausdorff(f, g).first, directed_hausdorff(g, f).first);
}

Scalar hausdorff_witness(const CompactSet& f, const CompactSet& g) {
  require_nonempty(f, "hausdorff_witness");
  require_nonempty(g, "hausdorff_witness");
  return directed_hausdorff(f, g).second;
}

bool in_nbhd(const CompactSet& f, const HitAndMissNbhd& n) {
  // Miss condition: closed-closed intersection must be empty.
  for (const auto& a : f.intervals())
    for (const auto& k : n.miss.intervals())
      if (a.lo <= k.hi && k.lo <= a.hi) return false;
  // Hit condition: f must meet every open interval.
  for (const auto& o : n.hits) {
    bool hit = false;
    for (const auto& a : f.intervals()) {
      if (a.lo < o.hi && a.hi > o.lo) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

CompactSet poly_image(const CompactSet& f, const Poly2& p) {
  require_nonempty(f, "poly_image");
  std::vector<Interval> images;
  images.reserve(f.size());
  for (const auto& iv : f.intervals()) {
    Scalar lo = p(iv.lo), hi = p(iv.hi);
    if (lo > hi) std::swap(lo, hi);
    if (p.has_critical_point()) {
      Scalar h = p.critical_point();
      if (iv.lo <= h && h <= iv.hi) {
        Scalar v = p(h);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    images.push_back(Interval{lo, hi});
  }
  return CompactSet::from_intervals(std::move(images));
}

CompactSet set_union(const CompactSet& f, const CompactSet& g) {
  std::vector<Interval> parts = f.intervals();
  parts.insert(parts.end(), g.intervals().begin(), g.intervals().end());
  return CompactSet::from_intervals(std::move(parts));
}

Scalar max_abs(const CompactSet& f) {
  require_nonempty(f, "max_abs");
  return std::max(std::abs(f.min()), std::abs(f.max()));
}

Scalar poly_sup_abs(const CompactSet& f, const Poly2& p) {
  require_nonempty(f, "poly_sup_abs");
  Scalar best = 0;
  auto consider = [&](Scalar x) { best = std::max(best, std::abs(p(x))); };
  for (const auto& iv : f.intervals()) {
    consider(iv.lo);
    consider(iv.hi);
    if (p.has_critical_point()) {
      Scalar h = p.critical_point();
      if (iv.lo <= h && h <= iv.hi) consider(h);
    }
  }
  return best;
}

}  // namespace opfield
