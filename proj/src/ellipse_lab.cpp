#include "raysplit/ellipse_lab.hpp"

#include <algorithm>
#include <cmath>

#include "raysplit/errors.hpp"
#include "raysplit/optics.hpp"
#include "raysplit/regions.hpp"

namespace raysplit {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Distance from point `p` to the infinite line through `q` with direction d.
double line_distance(const Vec2& q, const Dir2& d, const Vec2& p) {
  return std::abs(cross(d, p - q));
}

}  // namespace

const char* caustic_class_name(CausticClass c) {
  switch (c) {
    case CausticClass::Elliptic: return "elliptic";
    case CausticClass::Hyperbolic: return "hyperbolic";
    case CausticClass::Focal: return "focal";
    case CausticClass::MajorAxis: return "major-axis";
    case CausticClass::MinorAxis: return "minor-axis";
    default: return "gliding";
  }
}

EllipseFrame EllipseFrame::of(const BoundaryCurve& conic) {
  EllipseFrame fr;
  fr.center = conic.center();
  switch (conic.kind()) {
    case CurveKind::Circle: {
      fr.axis = Dir2(1.0, 0.0);
      fr.a = fr.b = conic.r_max();
      break;
    }
    case CurveKind::Ellipse: {
      // point_at_angle(0) is the +x vertex of the curve's own axis frame;
      // swap roles when the semi-minor direction is the longer one.
      const Vec2 vx = conic.point_at_angle(0.0) - conic.center();
      const Vec2 vy = conic.point_at_angle(kPi / 2.0) - conic.center();
      if (vx.norm() >= vy.norm()) {
        fr.axis = Dir2(vx);
        fr.a = vx.norm();
        fr.b = vy.norm();
      } else {
        fr.axis = Dir2(vy);
        fr.a = vy.norm();
        fr.b = vx.norm();
      }
      break;
    }
    default:
      throw ScenarioError("caustic analysis requires a circle or ellipse boundary");
  }
  fr.c = std::sqrt(std::max(0.0, fr.a * fr.a - fr.b * fr.b));
  fr.f1 = fr.center + fr.c * fr.axis;
  fr.f2 = fr.center - fr.c * fr.axis;
  return fr;
}

Vec2 EllipseFrame::to_local(const Vec2& p) const {
  const Vec2 d = p - center;
  return {dot(d, axis), cross(axis, d)};
}

Vec2 EllipseFrame::to_world(const Vec2& p) const {
  return center + p.x * axis.vec() + p.y * perp(axis.vec());
}

CausticClass classify_caustic(const BoundaryCurve& conic, const Vec2& p,
                              const Vec2& q, double tol) {
  const EllipseFrame fr = EllipseFrame::of(conic);
  if (distance(p, q) <= tol) return CausticClass::Gliding;
  const Vec2 lp = fr.to_local(p);
  const Vec2 lq = fr.to_local(q);
  if (std::abs(lp.y) <= tol && std::abs(lq.y) <= tol)
    return CausticClass::MajorAxis;
  if (std::abs(lp.x) <= tol && std::abs(lq.x) <= tol)
    return CausticClass::MinorAxis;
  const Dir2 d(q - p);
  if (line_distance(p, d, fr.f1) <= tol || line_distance(p, d, fr.f2) <= tol)
    return CausticClass::Focal;
  // Hyperbolic exactly when the open chord crosses the open focal segment:
  // the endpoints must straddle the axis and the crossing must land strictly
  // between the foci.
  if ((lp.y > 0.0) != (lq.y > 0.0)) {
    const double t = lp.y / (lp.y - lq.y);
    if (t > 0.0 && t < 1.0) {
      const double x = lp.x + t * (lq.x - lp.x);
      if (std::abs(x) < fr.c) return CausticClass::Hyperbolic;
    }
  }
  return CausticClass::Elliptic;
}

std::vector<Vec2> billiard_orbit(const BoundaryCurve& curve, double s,
                                 double theta, int n_bounces) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(std::max(0, n_bounces)) + 1);
  const CurveFrame f0 = curve.frame_at(s);
  Dir2 d(std::cos(theta) * f0.tangent.vec() -
         std::sin(theta) * f0.normal.vec());
  Vec2 p = curve.point_at(s);
  pts.push_back(p);
  const double skip = 1e-9 * (1.0 + curve.r_max());
  for (int k = 0; k < n_bounces; ++k) {
    const auto h = curve.intersect_ray(p, d, skip);
    if (!h) throw StuckRayError("billiard flight found no boundary ahead");
    p = h->point;
    pts.push_back(p);
    d = reflect(d, curve.frame_at(h->s).normal);
  }
  return pts;
}

FocalTrace focal_convergence(const BoundaryCurve& conic, double s_start,
                             int n_bounces, double y_tol) {
  const EllipseFrame fr = EllipseFrame::of(conic);
  FocalTrace out;
  out.points.reserve(static_cast<std::size_t>(std::max(0, n_bounces)) + 1);
  out.axis_angles.reserve(static_cast<std::size_t>(std::max(0, n_bounces)));
  Vec2 p = conic.point_at(s_start);
  Dir2 d(fr.f1 - p);
  out.points.push_back(p);
  const double skip = 1e-9 * (1.0 + conic.r_max());
  for (int k = 0; k < n_bounces; ++k) {
    out.axis_angles.push_back(std::asin(std::min(1.0, std::abs(cross(fr.axis, d)))));
    const auto h = conic.intersect_ray(p, d, skip);
    if (!h) throw StuckRayError("focal flight found no boundary ahead");
    p = h->point;
    out.points.push_back(p);
    d = reflect(d, conic.frame_at(h->s).normal);
    if (out.bounces_to_converge < 0 &&
        std::abs(fr.to_local(p).y) < y_tol) {
      out.bounces_to_converge = k + 1;
    }
  }
  // "Converged" means the axis was reached within the allotted bounces. The
  // axis orbit itself is unstable, so once the points sit at roundoff scale
  // the distance creeps back up along the unstable direction; the approach
  // phase is the meaningful part.
  out.converged = out.bounces_to_converge >= 0;
  return out;
}

BoundaryArc lemel_arc(const BoundaryCurve& conic, double s1) {
  const EllipseFrame fr = EllipseFrame::of(conic);
  const Vec2 x1 = conic.point_at(s1);
  const Vec2 l1 = fr.to_local(x1);
  if (!(l1.x < 0.0 && l1.y < 0.0))
    throw BadQuadrantError("arc generator point must lie strictly in the third quadrant");
  // The second boundary crossing of the line through the +axis focus. The
  // chord passes the focus strictly inside, so skipping a sliver past the
  // launch point cannot skip the far root.
  const Dir2 d(fr.f1 - x1);
  const auto h = conic.intersect_ray(x1, d, 1e-7 * (1.0 + conic.r_max()));
  if (!h) throw StuckRayError("focal chord found no second boundary point");
  return BoundaryArc::between(s1, h->s);
}

std::optional<Vec2> is_gamma_x0_form(const BoundaryCurve& curve,
                                     const BoundaryArc& gamma,
                                     double tol_param) {
  if (gamma.empty() || gamma.full() || gamma.span <= 0.5) return std::nullopt;
  const Vec2 p_lo = curve.point_at(gamma.lo);
  const Vec2 p_hi = curve.point_at(gamma.hi());
  const Dir2 t_lo = curve.frame_at(gamma.lo).tangent;
  const Dir2 t_hi = curve.frame_at(gamma.hi()).tangent;
  const double denom = cross(t_lo, t_hi);
  if (std::abs(denom) < 1e-12) return std::nullopt;  // parallel tangent lines
  const double u = cross(p_hi - p_lo, t_hi.vec()) / denom;
  const Vec2 x0 = p_lo + u * t_lo;
  if (curve.contains(x0)) return std::nullopt;
  try {
    if (arc_hausdorff(shadow_arc(curve, x0), gamma) <= tol_param) return x0;
  } catch (const InsidePointError&) {
    return std::nullopt;  // intersection landed on/inside the curve
  }
  return std::nullopt;
}

BothSidesReport both_sides_gcc(const BoundaryCurve& curve,
                               const BoundaryArc& gamma, double horizon,
                               int n_s, int n_theta) {
  BothSidesReport rep;
  rep.arc = check_gcc_simple(curve, gamma, horizon, n_s, n_theta);
  if (!gamma.full())
    rep.complement =
        check_gcc_simple(curve, gamma.complement(), horizon, n_s, n_theta);
  return rep;
}

}  // namespace raysplit
