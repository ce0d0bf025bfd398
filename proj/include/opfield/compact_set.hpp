#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "opfield/poly2.hpp"

namespace opfield {

/// Closed interval [lo, hi]. lo == hi represents an isolated point.
struct Interval {
  Scalar lo = 0;
  Scalar hi = 0;
  Scalar width() const { return hi - lo; }
};

/// Open interval (a, b) in the complement of a set, with both edges in the set.
struct Gap {
  Scalar a = 0;
  Scalar b = 0;
  Scalar width() const { return b - a; }
  Scalar center() const { return 0.5 * (a + b); }
};

/// A compact subset of the real line stored as a sorted union of disjoint
/// closed intervals. Consecutive intervals are strictly separated; isolated
/// points are kept as degenerate intervals. The empty set is allowed but most
/// queries reject it.
class CompactSet {
 public:
  CompactSet() = default;

  /// Normalizes: sorts by lower endpoint and merges overlapping or touching
  /// intervals. Rejects intervals with hi < lo or non-finite endpoints.
  static CompactSet from_intervals(std::vector<Interval> parts);

  /// Groups sorted points into intervals: consecutive points with spacing
  /// <= merge_tol share an interval. Empty input gives the empty set.
  /// Unsorted input is rejected.
  static CompactSet from_points(const std::vector<Scalar>& points, Scalar merge_tol);

  static CompactSet interval(Scalar lo, Scalar hi);
  static CompactSet point(Scalar x) { return interval(x, x); }

  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  const std::vector<Interval>& intervals() const { return parts_; }

  Scalar min() const;  // inf of the set; throws on empty
  Scalar max() const;  // sup of the set; throws on empty

  bool contains(Scalar x) const;

  bool operator==(const CompactSet& other) const { return equals(other, 0.0); }

  /// Endpoint-wise comparison with tolerance.
  bool equals(const CompactSet& other, Scalar tol) const;

 private:
  std::vector<Interval> parts_;
};

/// Vietoris-style neighborhood: sets that miss `miss` and hit every open
/// interval in `hits`.
struct HitAndMissNbhd {
  CompactSet miss;
  std::vector<Interval> hits;  // interpreted as open intervals (lo, hi), lo < hi
};

/// Bounded connected components of the complement, in increasing order.
std::vector<Gap> gaps(const CompactSet& f);

/// (inf f, sup f). Throws on empty.
std::pair<Scalar, Scalar> edges(const CompactSet& f);

/// Distance from x to the nearest point of f. Throws on empty.
Scalar dist_point(Scalar x, const CompactSet& f);

/// Exact Hausdorff distance computed from interval endpoints. Throws if
/// either set is empty.
Scalar hausdorff(const CompactSet& f, const CompactSet& g);

/// The point of f realizing sup_{x in f} dist(x, g).
Scalar hausdorff_witness(const CompactSet& f, const CompactSet& g);

bool in_nbhd(const CompactSet& f, const HitAndMissNbhd& n);

/// Exact image p(f) as an interval union.
CompactSet poly_image(const CompactSet& f, const Poly2& p);

CompactSet set_union(const CompactSet& f, const CompactSet& g);

/// max |x| over f.
Scalar max_abs(const CompactSet& f);

/// max |p(x)| over f, from interval endpoints and the critical point.
Scalar poly_sup_abs(const CompactSet& f, const Poly2& p);

}  // namespace opfield
