#pragma once

#include <optional>
#include <vector>

#include "raysplit/arc.hpp"
#include "raysplit/geometry.hpp"
#include "raysplit/observe.hpp"

namespace raysplit {

/// Invariant family of the caustic a billiard chord is tangent to inside an
/// elliptical table. The six cases partition all chords: the two axis
/// orbits, chords through a focus, chords crossing the open inter-focal
/// segment (hyperbolic caustic), all remaining chords (confocal-ellipse
/// caustic), and the degenerate gliding "chord" with coincident endpoints.
enum class CausticClass {
  Elliptic,
  Hyperbolic,
  Focal,
  MajorAxis,
  MinorAxis,
  Gliding,
};

const char* caustic_class_name(CausticClass c);

/// Major-axis frame of a conic boundary curve. For a circle both foci sit
/// at the centre (c = 0). Throws ScenarioError for non-conic curve kinds.
struct EllipseFrame {
  Vec2 center;
  Dir2 axis;                  // unit vector along the major axis
  double a = 1.0;             // semi-major length (>= b)
  double b = 1.0;             // semi-minor length
  double c = 0.0;             // focal half-distance sqrt(a^2 - b^2)
  Vec2 f1;                    // focus on the +axis side
  Vec2 f2;                    // focus on the -axis side

  static EllipseFrame of(const BoundaryCurve& conic);

  /// Coordinates with the centre at the origin and the major axis along x.
  Vec2 to_local(const Vec2& p) const;
  Vec2 to_world(const Vec2& p) const;
};

/// Classify the caustic of the chord p–q (endpoints on the curve).
/// Precedence: coincident endpoints are Gliding; chords collinear with an
/// axis are the axis classes; chords whose line passes within `tol` of a
/// focus are Focal; otherwise Hyperbolic exactly when the open chord crosses
/// the open segment between the foci, else Elliptic.
CausticClass classify_caustic(const BoundaryCurve& conic, const Vec2& p,
                              const Vec2& q, double tol = 1e-9);

/// Iterate the specular billiard map inside `curve` from the boundary point
/// at parameter `s`, launched at angle `theta` from the tangent (measured
/// into the domain). Returns the start point followed by `n_bounces` impact
/// points.
std::vector<Vec2> billiard_orbit(const BoundaryCurve& curve, double s,
                                 double theta, int n_bounces);

/// Orbit of a ray launched from the boundary through a focus. Such orbits
/// pass through the two foci alternately and converge to the major axis.
struct FocalTrace {
  std::vector<Vec2> points;         // start point plus one point per bounce
  std::vector<double> axis_angles;  // |angle between chord i and the axis|
  bool converged = false;           // some bounce came within y_tol of the axis
  int bounces_to_converge = -1;     // first bounce within y_tol, -1 if none
};

/// Launch from the boundary point at parameter `s_start` toward the +axis
/// focus and follow `n_bounces` reflections.
FocalTrace focal_convergence(const BoundaryCurve& conic, double s_start,
                             int n_bounces, double y_tol = 1e-6);

/// Observation arc generated by a third-quadrant boundary point x1 (local
/// coordinates strictly negative): the counter-clockwise arc from x1 to the
/// second intersection x2 of the line through x1 and the +axis focus. The
/// arc runs through the fourth quadrant and always contains the boundary
/// points (a, 0) and (0, -b). Throws BadQuadrantError when x1 is not
/// strictly inside the third quadrant.
BoundaryArc lemel_arc(const BoundaryCurve& conic, double s1);

/// Decide whether `gamma` is the visibility arc of some external point: the
/// tangent lines at the arc endpoints must meet at a point x0 outside the
/// curve whose visibility arc reproduces `gamma` within `tol_param`
/// (parameter units). Arcs spanning at most half the perimeter never
/// qualify, since every visibility arc of an external point exceeds half.
std::optional<Vec2> is_gamma_x0_form(const BoundaryCurve& curve,
                                     const BoundaryArc& gamma,
                                     double tol_param = 1e-9);

/// Boundary-control verdicts for an arc and its complement.
struct BothSidesReport {
  GccReport arc;
  std::optional<GccReport> complement;  // absent when the complement is empty
};

/// Run the single-medium control check on `gamma` and on its complement with
/// the same horizon and sampling grid.
BothSidesReport both_sides_gcc(const BoundaryCurve& curve,
                               const BoundaryArc& gamma, double horizon,
                               int n_s, int n_theta);

}  // namespace raysplit
