#pragma once

#include <algorithm>
#include <cmath>

namespace raysplit {

inline double wrap_param(double s) {
  double r = s - std::floor(s);
  if (r >= 1.0) r -= 1.0;  // guard against floor rounding at exact integers
  return r;
}

/// Open arc of a closed boundary curve in normalised arc-length parameter.
/// Stored as a start parameter plus a counter-clockwise span, so arcs that
/// wrap through s = 0 need no special casing. span == 0 is the empty arc,
/// span == 1 the full boundary.
struct BoundaryArc {
  double lo = 0.0;    // in [0, 1)
  double span = 0.0;  // in [0, 1]

  static BoundaryArc empty_arc() { return {0.0, 0.0}; }
  static BoundaryArc full_arc() { return {0.0, 1.0}; }

  /// Counter-clockwise from `a` to `b`.
  static BoundaryArc between(double a, double b) {
    BoundaryArc arc;
    arc.lo = wrap_param(a);
    arc.span = wrap_param(b - a);
    return arc;
  }

  bool empty() const { return span <= 0.0; }
  bool full() const { return span >= 1.0; }

  double hi() const { return wrap_param(lo + span); }
  double midpoint() const { return wrap_param(lo + span / 2.0); }

  /// Strict interior membership, shaved by `margin` at both endpoints.
  bool contains(double s, double margin = 0.0) const {
    if (full()) return true;
    if (empty()) return false;
    const double d = wrap_param(s - lo);
    return d > margin && d < span - margin;
  }

  /// True when `other` sits inside this arc, allowing `tol` slack per endpoint.
  bool contains_arc(const BoundaryArc& other, double tol = 0.0) const {
    if (other.empty() || full()) return true;
    if (empty()) return false;
    const double d = wrap_param(other.lo - lo);
    return d + tol >= 0.0 && d + other.span <= span + tol;
  }

  /// Complement arc (counter-clockwise from hi() back to lo).
  BoundaryArc complement() const {
    if (full()) return empty_arc();
    if (empty()) return full_arc();
    return {hi(), 1.0 - span};
  }
};

/// Distance between two parameters along the circle (shorter way around).
inline double param_distance(double a, double b) {
  const double d = wrap_param(a - b);
  return std::min(d, 1.0 - d);
}

/// Largest endpoint deviation between two arcs, in parameter units.
inline double arc_hausdorff(const BoundaryArc& a, const BoundaryArc& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.full() && b.full()) return 0.0;
  if (a.empty() != b.empty() || a.full() != b.full())
    return std::max(std::abs(a.span - b.span), param_distance(a.lo, b.lo));
  return std::max(param_distance(a.lo, b.lo), param_distance(a.hi(), b.hi()));
}

}  // namespace raysplit
