#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "raysplit/errors.hpp"
#include "raysplit/vec2.hpp"

namespace raysplit {

enum class CurveKind { Circle, Ellipse, Radial };

/// Orthonormal frame at a boundary point. `tangent` points counter-clockwise,
/// `normal` outward; curvature is strictly positive for admissible curves.
struct CurveFrame {
  Dir2 tangent;
  Dir2 normal;
  double curvature = 0.0;
};

struct RayHit {
  double s = 0.0;        // normalised arc-length parameter of the hit
  double distance = 0.0; // along the ray, in world units
  Vec2 point;
  bool grazing = false;  // incidence with the tangent below the tangency tolerance
};

/// Closed strictly convex boundary curve, parametrised counter-clockwise by
/// normalised arc length s in [0,1). The anchor (s = 0) defaults to the
/// crossing of the positive-x ray from the curve centre and can be moved to
/// the point nearest an external observer.
///
/// Internally every kind is driven by an angle-like parameter t in [0,2pi);
/// an arc-length table maps t <-> s with Newton refinement. Circle and
/// ellipse queries are analytic; the radial kind (centre + radius function
/// r(t)) falls back to dense sampling plus bisection.
class BoundaryCurve {
 public:
  using RadialFn = std::function<double(double)>;

  static BoundaryCurve circle(const Vec2& center, double radius);
  static BoundaryCurve ellipse(const Vec2& center, double a, double b, double axis_angle = 0.0);
  /// Optional derivative callbacks; finite differences are used when absent.
  static BoundaryCurve radial(const Vec2& center, RadialFn r, RadialFn dr = nullptr,
                              RadialFn ddr = nullptr, int samples = 4096);

  CurveKind kind() const { return kind_; }
  const Vec2& center() const { return center_; }
  double perimeter() const { return perimeter_; }

  /// Move the anchor so point_at(0) is the boundary point nearest `x0`.
  void anchor_nearest(const Vec2& x0);
  void anchor_at_angle(double t);
  double anchor_angle() const { return t_anchor_; }

  double param_from_angle(double t) const;  // internal angle -> s
  double angle_from_param(double s) const;  // s -> internal angle

  Vec2 point_at(double s) const;
  CurveFrame frame_at(double s) const;

  Vec2 point_at_angle(double t) const;
  CurveFrame frame_at_angle(double t) const;

  /// First intersection of the ray origin + u*dir with the curve at distance
  /// u > skip. Returns nothing when the ray misses.
  std::optional<RayHit> intersect_ray(const Vec2& origin, const Dir2& dir,
                                      double skip = 0.0) const;

  /// Parameters of the two tangency points seen from an exterior point,
  /// ordered so the first lies counter-clockwise of the sight line to the
  /// centre. Throws InsidePointError for interior points.
  std::pair<double, double> tangent_params_from(const Vec2& external) const;

  bool contains(const Vec2& p) const;

  /// Parameter of the boundary point nearest to `p`.
  double nearest_param(const Vec2& p) const;

  /// Extremal boundary point in direction d (maximises <x, d>).
  Vec2 support_point(const Dir2& d) const;

  /// Signed clearance between an infinite line (through p, direction d) and
  /// the curve: positive = line misses by that distance, zero = tangent,
  /// negative = line crosses (depth of overlap).
  double line_clearance(const Vec2& p, const Dir2& d) const;

  /// Incidence-angle threshold used for the grazing flag. A ray whose
  /// impact parameter is tangent to within roundoff still lands with a
  /// normal component of order sqrt(eps) ~ 1e-8, so the threshold must sit
  /// above that amplification.
  static constexpr double kTangencyTol = 1e-7;

  /// Largest distance from the centre to the curve (the curve's size scale).
  double r_max() const { return r_max_; }

 private:
  BoundaryCurve() = default;
  void build_tables();
  void validate_convexity() const;

  Vec2 derivative_at_angle(double t) const;   // d(point)/dt
  double speed_at_angle(double t) const;      // |d(point)/dt|
  double curvature_at_angle(double t) const;

  double arclen_from_angle(double t) const;   // cumulative from t = 0
  double angle_from_arclen(double len) const;

  double radial_value(double t) const;
  double radial_d1(double t) const;
  double radial_d2(double t) const;

  std::optional<RayHit> intersect_ray_conic(const Vec2& origin, const Dir2& dir,
                                            double skip) const;
  std::optional<RayHit> intersect_ray_radial(const Vec2& origin, const Dir2& dir,
                                             double skip) const;
  RayHit make_hit(const Vec2& origin, const Dir2& dir, double u) const;

  CurveKind kind_ = CurveKind::Circle;
  Vec2 center_;
  double radius_ = 1.0;                  // circle
  double a_ = 1.0, b_ = 1.0;             // ellipse semi-axes
  double cos_axis_ = 1.0, sin_axis_ = 0.0;
  RadialFn r_, dr_, ddr_;
  int samples_ = 4096;

  double perimeter_ = 0.0;
  double t_anchor_ = 0.0;
  double anchor_len_ = 0.0;              // arclen_from_angle(t_anchor_)
  std::vector<double> cum_;              // cumulative arc length at table nodes
  int table_n_ = 0;
  double r_min_ = 0.0, r_max_ = 0.0;     // radial extent around centre
};

}  // namespace raysplit
