#include "raysplit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace raysplit {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

}  // namespace

BoundaryCurve BoundaryCurve::circle(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw NonConvexError("circle radius must be positive");
  BoundaryCurve c;
  c.kind_ = CurveKind::Circle;
  c.center_ = center;
  c.radius_ = radius;
  c.build_tables();
  return c;
}

BoundaryCurve BoundaryCurve::ellipse(const Vec2& center, double a, double b, double axis_angle) {
  if (!(a > 0.0) || !(b > 0.0)) throw NonConvexError("ellipse semi-axes must be positive");
  BoundaryCurve c;
  c.kind_ = CurveKind::Ellipse;
  c.center_ = center;
  c.a_ = a;
  c.b_ = b;
  c.cos_axis_ = std::cos(axis_angle);
  c.sin_axis_ = std::sin(axis_angle);
  c.build_tables();
  return c;
}

BoundaryCurve BoundaryCurve::radial(const Vec2& center, RadialFn r, RadialFn dr, RadialFn ddr,
                                    int samples) {
  BoundaryCurve c;
  c.kind_ = CurveKind::Radial;
  c.center_ = center;
  c.r_ = std::move(r);
  c.dr_ = std::move(dr);
  c.ddr_ = std::move(ddr);
  c.samples_ = std::max(samples, 256);
  c.build_tables();
  c.validate_convexity();
  return c;
}

double BoundaryCurve::radial_value(double t) const { return r_(t); }

double BoundaryCurve::radial_d1(double t) const {
  if (dr_) return dr_(t);
  const double h = 1e-5;
  return (r_(t + h) - r_(t - h)) / (2.0 * h);
}

double BoundaryCurve::radial_d2(double t) const {
  if (ddr_) return ddr_(t);
  const double h = 1e-4;
  return (r_(t + h) - 2.0 * r_(t) + r_(t - h)) / (h * h);
}

Vec2 BoundaryCurve::point_at_angle(double t) const {
  switch (kind_) {
    case CurveKind::Circle:
      return center_ + Vec2{radius_ * std::cos(t), radius_ * std::sin(t)};
    case CurveKind::Ellipse: {
      const Vec2 local{a_ * std::cos(t), b_ * std::sin(t)};
      return center_ + Vec2{cos_axis_ * local.x - sin_axis_ * local.y,
                            sin_axis_ * local.x + cos_axis_ * local.y};
    }
    case CurveKind::Radial: {
      const double r = radial_value(t);
      return center_ + Vec2{r * std::cos(t), r * std::sin(t)};
    }
  }
  return center_;
}

Vec2 BoundaryCurve::derivative_at_angle(double t) const {
  switch (kind_) {
    case CurveKind::Circle:
      return {-radius_ * std::sin(t), radius_ * std::cos(t)};
    case CurveKind::Ellipse: {
      const Vec2 local{-a_ * std::sin(t), b_ * std::cos(t)};
      return {cos_axis_ * local.x - sin_axis_ * local.y,
              sin_axis_ * local.x + cos_axis_ * local.y};
    }
    case CurveKind::Radial: {
      const double r = radial_value(t), r1 = radial_d1(t);
      const double c = std::cos(t), s = std::sin(t);
      return {r1 * c - r * s, r1 * s + r * c};
    }
  }
  return {0.0, 0.0};
}

double BoundaryCurve::speed_at_angle(double t) const { return derivative_at_angle(t).norm(); }

double BoundaryCurve::curvature_at_angle(double t) const {
  switch (kind_) {
    case CurveKind::Circle:
      return 1.0 / radius_;
    case CurveKind::Ellipse: {
      const double s = std::sin(t), c = std::cos(t);
      const double denom = std::pow(a_ * a_ * s * s + b_ * b_ * c * c, 1.5);
      return a_ * b_ / denom;
    }
    case CurveKind::Radial: {
      const double r = radial_value(t), r1 = radial_d1(t), r2 = radial_d2(t);
      const double num = r * r + 2.0 * r1 * r1 - r * r2;
      const double denom = std::pow(r * r + r1 * r1, 1.5);
      return num / denom;
    }
  }
  return 0.0;
}

void BoundaryCurve::build_tables() {
  // Cumulative arc length over [0, 2pi), refined until the perimeter is
  // stable to relative 1e-12 (adaptive doubling; smooth integrands converge
  // long before the cap).
  int n = (kind_ == CurveKind::Radial) ? samples_ : 1024;
  double prev = -1.0;
  for (;; n *= 2) {
    cum_.assign(static_cast<size_t>(n) + 1, 0.0);
    const double h = kTwoPi / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t0 = i * h;
      double seg = 0.0;
      for (int k = 0; k < 5; ++k)
        seg += kGlWeight[k] * speed_at_angle(t0 + 0.5 * h * (1.0 + kGlNode[k]));
      seg *= 0.5 * h;
      acc += seg;
      cum_[static_cast<size_t>(i) + 1] = acc;
    }
    table_n_ = n;
    perimeter_ = acc;
    if (prev > 0.0 && std::abs(perimeter_ - prev) <= 1e-12 * perimeter_) break;
    if (n >= 65536) break;
    prev = perimeter_;
  }

  r_min_ = 1e300;
  r_max_ = 0.0;
  for (int i = 0; i < table_n_; ++i) {
    const double rr = (point_at_angle(i * kTwoPi / table_n_) - center_).norm();
    r_min_ = std::min(r_min_, rr);
    r_max_ = std::max(r_max_, rr);
  }

  t_anchor_ = 0.0;
  anchor_len_ = 0.0;
}

void BoundaryCurve::validate_convexity() const {
  for (int i = 0; i < table_n_; ++i) {
    const double t = i * kTwoPi / table_n_;
    if (!(curvature_at_angle(t) > 1e-12))
      throw NonConvexError("boundary curve is not strictly convex");
    if (!(radial_value(t) > 0.0))
      throw NonConvexError("radial function must stay positive");
  }
}

double BoundaryCurve::arclen_from_angle(double t) const {
  t = wrap_angle(t);
  const double h = kTwoPi / table_n_;
  const int seg = std::min(static_cast<int>(t / h), table_n_ - 1);
  const double t0 = seg * h;
  double part = 0.0;
  const double w = t - t0;
  if (w > 0.0) {
    for (int k = 0; k < 5; ++k)
      part += kGlWeight[k] * speed_at_angle(t0 + 0.5 * w * (1.0 + kGlNode[k]));
    part *= 0.5 * w;
  }
  return cum_[seg] + part;
}

double BoundaryCurve::angle_from_arclen(double len) const {
  len = std::fmod(len, perimeter_);
  if (len < 0.0) len += perimeter_;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), len);
  int seg = static_cast<int>(it - cum_.begin()) - 1;
  seg = std::clamp(seg, 0, table_n_ - 1);
  const double h = kTwoPi / table_n_;
  double t = seg * h + h * (len - cum_[seg]) / std::max(cum_[seg + 1] - cum_[seg], 1e-300);
  // Newton on the periodically extended cumulative length, so roots near the
  // parameter seam do not see a jump.
  const auto arclen_ext = [&](double tt) {
    const double k = std::floor(tt / kTwoPi);
    return k * perimeter_ + arclen_from_angle(tt - k * kTwoPi);
  };
  for (int it2 = 0; it2 < 40; ++it2) {
    const double f = arclen_ext(t) - len;
    const double d = speed_at_angle(t);
    const double step = f / d;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return wrap_angle(t);
}

void BoundaryCurve::anchor_at_angle(double t) {
  t_anchor_ = wrap_angle(t);
  anchor_len_ = arclen_from_angle(t_anchor_);
}

void BoundaryCurve::anchor_nearest(const Vec2& x0) {
  // Coarse scan, then bisect the distance derivative (golden-section on the
  // squared distance stalls at ~sqrt(eps) because the minimum is flat).
  const int n = 720;
  double best_t = 0.0, best_d = 1e300;
  for (int i = 0; i < n; ++i) {
    const double t = i * kTwoPi / n;
    const double d = (point_at_angle(t) - x0).norm2();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  auto slope = [&](double t) { return dot(point_at_angle(t) - x0, derivative_at_angle(t)); };
  double lofi = best_t - kTwoPi / n, hifi = best_t + kTwoPi / n;
  if (slope(lofi) > 0.0 || slope(hifi) < 0.0) {
    anchor_at_angle(wrap_angle(best_t));
    return;
  }
  for (int i = 0; i < 200 && hifi - lofi > 1e-15; ++i) {
    const double mid = 0.5 * (lofi + hifi);
    if (slope(mid) <= 0.0)
      lofi = mid;
    else
      hifi = mid;
  }
  anchor_at_angle(wrap_angle(0.5 * (lofi + hifi)));
}

double BoundaryCurve::param_from_angle(double t) const {
  double rel = arclen_from_angle(t) - anchor_len_;
  if (rel < 0.0) rel += perimeter_;
  return rel / perimeter_;
}

double BoundaryCurve::angle_from_param(double s) const {
  s -= std::floor(s);
  return angle_from_arclen(anchor_len_ + s * perimeter_);
}

Vec2 BoundaryCurve::point_at(double s) const { return point_at_angle(angle_from_param(s)); }

CurveFrame BoundaryCurve::frame_at_angle(double t) const {
  const Vec2 d = derivative_at_angle(t);
  CurveFrame f;
  f.tangent = Dir2(d);
  f.normal = f.tangent.rotated90().reversed();  // outward for ccw parametrisation
  f.curvature = curvature_at_angle(t);
  if (!(f.curvature > 1e-12)) throw NonConvexError("curvature not strictly positive");
  return f;
}

CurveFrame BoundaryCurve::frame_at(double s) const { return frame_at_angle(angle_from_param(s)); }

RayHit BoundaryCurve::make_hit(const Vec2& origin, const Dir2& dir, double u) const {
  RayHit h;
  h.distance = u;
  h.point = origin + u * dir;
  const double t = std::atan2(h.point.y - center_.y, h.point.x - center_.x);
  double tt = t;
  if (kind_ == CurveKind::Ellipse) {
    // Undo the axis rotation, then recover the angle parameter from the
    // stretched coordinates.
    const Vec2 rel = h.point - center_;
    const Vec2 local{cos_axis_ * rel.x + sin_axis_ * rel.y,
                     -sin_axis_ * rel.x + cos_axis_ * rel.y};
    tt = std::atan2(local.y / b_, local.x / a_);
  }
  tt = wrap_angle(tt);
  h.s = param_from_angle(tt);
  const CurveFrame f = frame_at_angle(tt);
  h.grazing = std::abs(dot(dir, f.normal)) < std::sin(kTangencyTol);
  return h;
}

std::optional<RayHit> BoundaryCurve::intersect_ray(const Vec2& origin, const Dir2& dir,
                                                   double skip) const {
  if (kind_ == CurveKind::Radial) return intersect_ray_radial(origin, dir, skip);
  return intersect_ray_conic(origin, dir, skip);
}

std::optional<RayHit> BoundaryCurve::intersect_ray_conic(const Vec2& origin, const Dir2& dir,
                                                         double skip) const {
  // Map to the unit circle: translate, un-rotate, scale axes. The ray
  // parameter u is preserved, so roots are world distances.
  Vec2 o = origin - center_;
  Vec2 d = dir.vec();
  if (kind_ == CurveKind::Ellipse) {
    o = {cos_axis_ * o.x + sin_axis_ * o.y, -sin_axis_ * o.x + cos_axis_ * o.y};
    d = {cos_axis_ * d.x + sin_axis_ * d.y, -sin_axis_ * d.x + cos_axis_ * d.y};
    o = {o.x / a_, o.y / b_};
    d = {d.x / a_, d.y / b_};
  } else {
    o = o / radius_;
    d = d / radius_;
  }
  const double A = d.norm2();
  const double B = 2.0 * dot(o, d);
  const double C = o.norm2() - 1.0;
  const double disc = B * B - 4.0 * A * C;
  const double scale = B * B + std::abs(4.0 * A * C) + 1e-300;
  if (disc < 0.0) {
    if (disc > -1e-12 * scale) {
      const double u = -B / (2.0 * A);  // tangency within roundoff
      if (u > skip) return make_hit(origin, dir, u);
    }
    return std::nullopt;
  }
  const double sq = std::sqrt(std::max(disc, 0.0));
  // Numerically stable quadratic roots.
  const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
  double u1 = q / A;
  double u2 = (q != 0.0) ? C / q : u1;
  if (u1 > u2) std::swap(u1, u2);
  if (u1 > skip) return make_hit(origin, dir, u1);
  if (u2 > skip) return make_hit(origin, dir, u2);
  return std::nullopt;
}

std::optional<RayHit> BoundaryCurve::intersect_ray_radial(const Vec2& origin, const Dir2& dir,
                                                          double skip) const {
  // March along the ray watching F(p) = |p - c| - r(angle(p)); refine sign
  // changes by bisection. Also trap tangential dips that do not change sign.
  const auto F = [&](double u) {
    const Vec2 p = origin + u * dir;
    const Vec2 rel = p - center_;
    const double rho = rel.norm();
    const double t = std::atan2(rel.y, rel.x);
    return rho - radial_value(t);
  };
  // The whole curve lies within r_max_ of the centre; beyond the closest
  // approach plus r_max_ the ray can no longer intersect.
  const double proj = dot(center_ - origin, dir);
  const double u_end = proj + r_max_ + 1.0;
  if (u_end <= skip) return std::nullopt;
  const double step = std::max(r_min_ / 64.0, (u_end - skip) / 4096.0);
  double u_prev = skip;
  double f_prev = F(u_prev);
  double dip_u = -1.0, dip_f = 1e300;
  double f_before = f_prev;
  for (double u = skip + step; u <= u_end + step; u += step) {
    const double f = F(u);
    if (f_prev > 0.0 && f <= 0.0) {
      // Bisect to the crossing.
      double a = u_prev, b = u;
      for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        if (F(m) > 0.0)
          a = m;
        else
          b = m;
        if (b - a < 1e-14 * std::max(1.0, b)) break;
      }
      const double hit_u = 0.5 * (a + b);
      if (hit_u > skip) return make_hit(origin, dir, hit_u);
    }
    if (f_prev < 0.0 && f >= 0.0) {
      double a = u_prev, b = u;
      for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        if (F(m) < 0.0)
          a = m;
        else
          b = m;
        if (b - a < 1e-14 * std::max(1.0, b)) break;
      }
      const double hit_u = 0.5 * (a + b);
      if (hit_u > skip) return make_hit(origin, dir, hit_u);
    }
    // Track local minima of F for grazing contacts (F dips to ~0 without
    // crossing).
    if (f_prev < f && f_prev < f_before && f_prev < dip_f) {
      dip_f = f_prev;
      dip_u = u_prev;
    }
    f_before = f_prev;
    f_prev = f;
    u_prev = u;
  }
  if (dip_u > skip && dip_f < 1e-9 * std::max(1.0, r_max_)) {
    // Golden-section refine the dip and accept if it touches the curve.
    double lofi = std::max(skip, dip_u - step), hifi = dip_u + step;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hifi - gr * (hifi - lofi), d = lofi + gr * (hifi - lofi);
    for (int i = 0; i < 90; ++i) {
      if (F(c) < F(d))
        hifi = d;
      else
        lofi = c;
      c = hifi - gr * (hifi - lofi);
      d = lofi + gr * (hifi - lofi);
    }
    const double um = 0.5 * (lofi + hifi);
    if (std::abs(F(um)) < 1e-10 * std::max(1.0, r_max_)) return make_hit(origin, dir, um);
  }
  return std::nullopt;
}

bool BoundaryCurve::contains(const Vec2& p) const {
  switch (kind_) {
    case CurveKind::Circle:
      return (p - center_).norm2() < radius_ * radius_;
    case CurveKind::Ellipse: {
      const Vec2 rel = p - center_;
      const Vec2 local{cos_axis_ * rel.x + sin_axis_ * rel.y,
                       -sin_axis_ * rel.x + cos_axis_ * rel.y};
      const double q = (local.x / a_) * (local.x / a_) + (local.y / b_) * (local.y / b_);
      return q < 1.0;
    }
    case CurveKind::Radial: {
      const Vec2 rel = p - center_;
      const double rho = rel.norm();
      if (rho == 0.0) return true;
      return rho < radial_value(std::atan2(rel.y, rel.x));
    }
  }
  return false;
}

std::pair<double, double> BoundaryCurve::tangent_params_from(const Vec2& external) const {
  if (contains(external)) throw InsidePointError("tangent construction from an interior point");
  if (kind_ == CurveKind::Circle || kind_ == CurveKind::Ellipse) {
    // In the stretched frame the curve is the unit circle and tangency is
    // preserved, as is the angle parameter t.
    Vec2 e = external - center_;
    if (kind_ == CurveKind::Ellipse) {
      e = {cos_axis_ * e.x + sin_axis_ * e.y, -sin_axis_ * e.x + cos_axis_ * e.y};
      e = {e.x / a_, e.y / b_};
    } else {
      e = e / radius_;
    }
    const double d = e.norm();
    if (d <= 1.0) throw InsidePointError("tangent construction from a point on or inside the curve");
    const double base = std::atan2(e.y, e.x);
    const double half = std::acos(1.0 / d);
    // Tangency points sit at base +- (pi/2 + asin: for the unit circle the
    // tangent point angles are base +- acos(1/d) relative to the centre line
    // rotated by.. derive directly: tangency point T satisfies <T - e, T> = 0
    // with |T| = 1, giving T at angle base +- acos(1/d).
    const double t_ccw = wrap_angle(base + half);
    const double t_cw = wrap_angle(base - half);
    return {param_from_angle(t_ccw), param_from_angle(t_cw)};
  }
  // Radial: roots of g(t) = <gamma(t) - e, n(t)>; convex curve + exterior
  // point yields exactly two sign changes.
  const int n = std::max(table_n_, 1024);
  std::vector<double> roots;
  double t_prev = 0.0;
  const auto g = [&](double t) {
    const CurveFrame f = frame_at_angle(t);
    return dot(point_at_angle(t) - external, f.normal);
  };
  double g_prev = g(0.0);
  for (int i = 1; i <= n; ++i) {
    const double t = i * kTwoPi / n;
    const double gv = g(t);
    if ((g_prev < 0.0) != (gv < 0.0)) {
      double a = t_prev, b = t;
      double ga = g_prev;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if ((ga < 0.0) != (gm < 0.0))
          b = m;
        else {
          a = m;
          ga = gm;
        }
        if (b - a < 1e-15) break;
      }
      roots.push_back(0.5 * (a + b));
    }
    g_prev = gv;
    t_prev = t;
  }
  if (roots.size() != 2)
    throw InsidePointError("tangent construction failed to find two tangency points");
  // Order: first root counter-clockwise of the sight line.
  const Dir2 sight(center_ - external);
  const Vec2 v0 = point_at_angle(roots[0]) - external;
  const double t_ccw = cross(sight, v0) > 0.0 ? roots[0] : roots[1];
  const double t_cw = cross(sight, v0) > 0.0 ? roots[1] : roots[0];
  return {param_from_angle(t_ccw), param_from_angle(t_cw)};
}

double BoundaryCurve::nearest_param(const Vec2& p) const {
  const int n = 720;
  double best_t = 0.0, best_d = 1e300;
  for (int i = 0; i < n; ++i) {
    const double t = i * kTwoPi / n;
    const double d = (point_at_angle(t) - p).norm2();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  // Golden-section alone stalls at ~sqrt(eps) because |gamma - p|^2 is flat
  // near the minimum; finish on the derivative, which crosses zero linearly.
  const double step = kTwoPi / n;
  auto slope = [&](double t) { return dot(point_at_angle(t) - p, derivative_at_angle(t)); };
  double lofi = best_t - step, hifi = best_t + step;
  double flo = slope(lofi), fhi = slope(hifi);
  if (flo > 0.0 || fhi < 0.0)  // scan minimum was at a bracket edge; re-centre
    return param_from_angle(wrap_angle(best_t));
  for (int i = 0; i < 200 && hifi - lofi > 1e-15; ++i) {
    const double mid = 0.5 * (lofi + hifi);
    const double fm = slope(mid);
    if (fm <= 0.0) {
      lofi = mid;
      flo = fm;
    } else {
      hifi = mid;
      fhi = fm;
    }
  }
  (void)flo;
  (void)fhi;
  return param_from_angle(wrap_angle(0.5 * (lofi + hifi)));
}

Vec2 BoundaryCurve::support_point(const Dir2& d) const {
  switch (kind_) {
    case CurveKind::Circle:
      return center_ + radius_ * d;
    case CurveKind::Ellipse: {
      // Maximise <R(a cos t, b sin t), d>: t* = atan2(b * dy', a * dx') in the
      // un-rotated frame.
      const Vec2 dl{cos_axis_ * d.x() + sin_axis_ * d.y(),
                    -sin_axis_ * d.x() + cos_axis_ * d.y()};
      const double t = std::atan2(b_ * dl.y, a_ * dl.x);
      return point_at_angle(wrap_angle(t));
    }
    case CurveKind::Radial: {
      const int n = std::max(table_n_, 1024);
      double best_t = 0.0, best_v = -1e300;
      for (int i = 0; i < n; ++i) {
        const double t = i * kTwoPi / n;
        const double v = dot(point_at_angle(t), d);
        if (v > best_v) {
          best_v = v;
          best_t = t;
        }
      }
      double lofi = best_t - kTwoPi / n, hifi = best_t + kTwoPi / n;
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = hifi - gr * (hifi - lofi), dd = lofi + gr * (hifi - lofi);
      for (int i = 0; i < 100; ++i) {
        if (dot(point_at_angle(c), d) > dot(point_at_angle(dd), d))
          hifi = dd;
        else
          lofi = c;
        c = hifi - gr * (hifi - lofi);
        dd = lofi + gr * (hifi - lofi);
      }
      return point_at_angle(0.5 * (lofi + hifi));
    }
  }
  return center_;
}

double BoundaryCurve::line_clearance(const Vec2& p, const Dir2& d) const {
  const Dir2 m = d.rotated90();
  const double f_max = dot(support_point(m) - p, m);
  const double f_min = dot(support_point(m.reversed()) - p, m);
  if (f_min > 0.0) return f_min;          // curve entirely on the +m side
  if (f_max < 0.0) return -f_max;         // entirely on the -m side
  return -std::min(f_max, -f_min);        // line crosses; negative overlap
}

}  // namespace raysplit
