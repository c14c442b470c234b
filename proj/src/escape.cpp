#include "raysplit/escape.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "raysplit/errors.hpp"
#include "raysplit/tracer.hpp"

namespace raysplit {
namespace {

constexpr double kPi = 3.14159265358979323846;

const BoundaryCurve& inner_of(const Scenario& sc) {
  if (!sc.inner) throw ScenarioError("this check needs an inclusion");
  return *sc.inner;
}

/// Difference a - b on the parameter circle, mapped to (-0.5, 0.5].
double signed_diff(double a, double b) {
  double d = wrap_param(a - b);
  if (d > 0.5) d -= 1.0;
  return d;
}

// ---------------------------------------------------------------------------
// Monotone escape scan.

EscapeProfile scan_profile(const Scenario& sc, const BoundaryArc& gamma2,
                           double spacing) {
  EscapeProfile prof;
  const BoundaryArc comp = gamma2.complement();
  if (comp.empty()) {
    prof.vacuous = true;
    prof.nondecreasing = true;
    return prof;
  }
  const BoundaryCurve& inner = inner_of(sc);
  if (spacing <= 0.0) spacing = 1.0 / 1024.0;
  const int n = std::max(2, static_cast<int>(std::ceil(comp.span / spacing)) + 1);
  prof.samples.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = wrap_param(comp.lo + comp.span * i / (n - 1));
    const double v = escape_value(sc, s, inner.frame_at(s).normal);
    prof.samples.push_back({s, v});
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double before = prof.samples[i].value;
    const double after = prof.samples[i + 1].value;
    if (after < before - sc.tol.mono)
      prof.violations.push_back(
          {prof.samples[i].s, prof.samples[i + 1].s, before - after});
  }
  prof.nondecreasing = prof.violations.empty();
  return prof;
}

// ---------------------------------------------------------------------------
// Wall first-return map for the hard-mirror shell dynamics.

struct WallState {
  double s = 0.0;      // wall parameter
  double theta = 0.0;  // outgoing angle from the ccw tangent, in (0, pi)
};

struct BouncePoint {
  Surface surface = Surface::Wall;
  double s = 0.0;
  Vec2 point;
  Dir2 out_dir{Vec2{1.0, 0.0}};
  double theta_normal = 0.0;  // incidence angle measured from the normal
};

struct ReturnStep {
  WallState state;      // outgoing state at the next wall bounce
  double length = 0.0;  // path length travelled to reach it
  bool touched_gamma1 = false;
  bool touched_gamma2 = false;
};

/// Outgoing angle (from the ccw tangent) of direction `d` at wall point `s`.
double wall_angle(const Scenario& sc, double s, const Dir2& d) {
  const CurveFrame f = sc.outer.frame_at(s);
  return std::atan2(-dot(d, f.normal), dot(d, f.tangent));
}

/// Fly from an outgoing wall state to the next wall bounce, reflecting off
/// the inclusion as a hard mirror on the way. Records intermediate bounces
/// in `bounces` when given (the final wall arrival is appended too).
ReturnStep wall_return(const Scenario& sc, const BoundaryArc& gamma1,
                       const BoundaryArc& gamma2, const WallState& w,
                       std::vector<BouncePoint>* bounces = nullptr) {
  PhasePoint p = boundary_phase(sc, Surface::Wall, w.s, w.theta, Medium::Shell);
  ReturnStep step;
  for (int hop = 0; hop < 8; ++hop) {
    const Collision c = collision_shell(sc, p);
    step.length += c.hit.distance;
    if (bounces)
      bounces->push_back({c.surface, c.hit.s, c.hit.point, c.reflected.dir, c.theta});
    if (c.surface == Surface::Wall) {
      if (gamma1.contains(c.hit.s)) step.touched_gamma1 = true;
      step.state.s = c.hit.s;
      step.state.theta = wall_angle(sc, c.hit.s, c.reflected.dir);
      return step;
    }
    if (gamma2.contains(c.hit.s)) step.touched_gamma2 = true;
    p = c.reflected;
  }
  throw StuckRayError("shell flight failed to return to the outer wall");
}

/// w advanced by `period` wall returns; nullopt when the flight degenerates.
std::optional<WallState> iterate_map(const Scenario& sc, const BoundaryArc& g1,
                                     const BoundaryArc& g2, WallState w,
                                     int period) {
  try {
    for (int k = 0; k < period; ++k)
      w = wall_return(sc, g1, g2, w).state;
    return w;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// First-return residual W^period(x) - x, wrap-aware in the parameter.
std::optional<Vec2> return_residual(const Scenario& sc, const BoundaryArc& g1,
                                    const BoundaryArc& g2, const WallState& w,
                                    int period) {
  const auto end = iterate_map(sc, g1, g2, w, period);
  if (!end) return std::nullopt;
  return Vec2{signed_diff(end->s, w.s), end->theta - w.theta};
}

/// Newton polish of a near-periodic wall state. Returns the refined state and
/// its residual norm, or nullopt when the iteration fails to reach the orbit
/// tolerance.
std::optional<std::pair<WallState, double>> polish_orbit(
    const Scenario& sc, const BoundaryArc& g1, const BoundaryArc& g2,
    WallState w, int period) {
  constexpr double kStepCap = 0.08;  // trust region on Newton updates
  constexpr double kFd = 1e-7;
  double best_norm = 1e300;
  WallState best = w;
  for (int iter = 0; iter < 40; ++iter) {
    const auto res = return_residual(sc, g1, g2, w, period);
    if (!res) break;
    const double norm = std::hypot(res->x, res->y);
    if (norm < best_norm) {
      best_norm = norm;
      best = w;
    }
    if (norm < 1e-14) break;  // at the floating-point floor; stop early
    const auto rs = return_residual(sc, g1, g2, {w.s + kFd, w.theta}, period);
    const auto rt = return_residual(sc, g1, g2, {w.s, w.theta + kFd}, period);
    if (!rs || !rt) break;
    const double j00 = (rs->x - res->x) / kFd, j01 = (rt->x - res->x) / kFd;
    const double j10 = (rs->y - res->y) / kFd, j11 = (rt->y - res->y) / kFd;
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-14) break;  // singular along a neutral family
    double ds = -(j11 * res->x - j01 * res->y) / det;
    double dt = -(-j10 * res->x + j00 * res->y) / det;
    const double step = std::hypot(ds, dt);
    if (step > kStepCap) {
      ds *= kStepCap / step;
      dt *= kStepCap / step;
    }
    w.s = wrap_param(w.s + ds);
    w.theta = std::clamp(w.theta + dt, 0.01, kPi - 0.01);
  }
  if (best_norm < sc.tol.orbit) return std::make_pair(best, best_norm);
  return std::nullopt;
}

/// Collapse a cycle that is an exact multi-cover of a shorter one to its
/// primitive period, scaling the accumulated length down with it.
void reduce_to_primitive(std::vector<BouncePoint>& cycle, double* length) {
  const size_t n = cycle.size();
  for (size_t p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool match = true;
    for (size_t i = 0; i < n && match; ++i)
      match = distance(cycle[i].point, cycle[(i + p) % n].point) < 1e-9;
    if (match) {
      *length *= static_cast<double>(p) / static_cast<double>(n);
      cycle.resize(p);
      return;
    }
  }
}

/// Rotate the bounce cycle so it starts at the wall bounce of smallest
/// parameter (orbit cycles always contain a wall bounce).
void canonicalize(std::vector<BouncePoint>& cycle) {
  size_t pivot = 0;
  bool found = false;
  for (size_t i = 0; i < cycle.size(); ++i) {
    if (cycle[i].surface != Surface::Wall) continue;
    if (!found || cycle[i].s < cycle[pivot].s) {
      pivot = i;
      found = true;
    }
  }
  if (found) std::rotate(cycle.begin(), cycle.begin() + pivot, cycle.end());
}

bool points_match(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (distance(a[i], b[i]) > 1e-6) return false;
  return true;
}

/// Same closed polygon up to traversal direction (lists are canonicalized, so
/// only the identity rotation and the anchored reversal need checking).
bool same_orbit(const TrappedOrbit& a, const TrappedOrbit& b) {
  if (a.points.size() != b.points.size()) return false;
  if (points_match(a.points, b.points)) return true;
  std::vector<Vec2> rev(a.points.size());
  rev[0] = a.points[0];
  for (size_t i = 1; i < a.points.size(); ++i)
    rev[i] = a.points[a.points.size() - i];
  return points_match(rev, b.points);
}

/// Re-trace one period from a polished state and certify that the cycle never
/// meets either observed arc and bounces off the inclusion only above the
/// critical angle. Returns nothing when certification fails.
std::optional<TrappedOrbit> certify_orbit(const Scenario& sc,
                                          const BoundaryArc& g1,
                                          const BoundaryArc& g2,
                                          const WallState& w, int period) {
  if (g1.contains(w.s)) return std::nullopt;
  const double theta_c = sc.has_inner() && sc.c2 > sc.c1 ? sc.critical() : kPi;

  std::vector<BouncePoint> cycle;
  const PhasePoint start =
      boundary_phase(sc, Surface::Wall, w.s, w.theta, Medium::Shell);
  cycle.push_back({Surface::Wall, w.s, start.position, start.dir,
                   std::acos(std::clamp(
                       std::abs(dot(start.dir, sc.outer.frame_at(w.s).normal)),
                       0.0, 1.0))});
  WallState cur = w;
  double length = 0.0;
  try {
    for (int k = 0; k < period; ++k) {
      const ReturnStep step = wall_return(sc, g1, g2, cur, &cycle);
      if (step.touched_gamma1 || step.touched_gamma2) return std::nullopt;
      length += step.length;
      cur = step.state;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  // The final wall arrival closes the cycle back at the start bounce.
  const BouncePoint closing = cycle.back();
  cycle.pop_back();
  const double closure =
      std::hypot(signed_diff(closing.s, w.s),
                 wall_angle(sc, closing.s, closing.out_dir) - w.theta);
  if (closure > 1e-8) return std::nullopt;

  TrappedOrbit orbit;
  orbit.mechanism = TrapMechanism::PureWall;
  for (const BouncePoint& b : cycle) {
    if (b.surface == Surface::Interface) {
      orbit.mechanism = TrapMechanism::TirRetroreflection;
      // A bounce at or below the critical angle would leak a transmitted
      // branch, so the cycle would not trap energy.
      if (b.theta_normal <= theta_c + sc.tol.angle) return std::nullopt;
    }
  }
  reduce_to_primitive(cycle, &length);
  canonicalize(cycle);
  for (const BouncePoint& b : cycle) {
    orbit.surfaces.push_back(b.surface);
    orbit.params.push_back(b.s);
    orbit.points.push_back(b.point);
    orbit.directions.push_back(b.out_dir);
    orbit.thetas.push_back(b.theta_normal);
  }
  orbit.period_length = length;
  orbit.period_time = length / sc.c1;
  orbit.closure_error = closure;
  return orbit;
}

}  // namespace

// ---------------------------------------------------------------------------

double escape_value(const Scenario& sc, double s, const Dir2& xi) {
  const BoundaryCurve& inner = inner_of(sc);
  const Vec2 x = inner.point_at(s);
  const double skip = 1e-9 * (1.0 + inner.r_max());
  const auto outer_hit = sc.outer.intersect_ray(x, xi, skip);
  if (!outer_hit)
    throw ConstructionError("escape flight never reaches the outer boundary");
  const auto inner_hit = inner.intersect_ray(x, xi, skip);
  if (inner_hit && inner_hit->distance < outer_hit->distance)
    return dot(xi, inner.frame_at(inner_hit->s).tangent);
  return dot(xi, sc.outer.frame_at(outer_hit->s).tangent);
}

EscapeProfile is_uniformly_escaping(const Scenario& sc, const BoundaryArc& gamma2,
                                    double spacing) {
  if (spacing <= 0.0) spacing = 1.0 / 1024.0;
  EscapeProfile prof = scan_profile(sc, gamma2, spacing);
  if (prof.vacuous) {
    prof.refinement_stable = true;
    return prof;
  }
  const EscapeProfile finer = scan_profile(sc, gamma2, spacing / 2.0);
  prof.refinement_stable = (prof.nondecreasing == finer.nondecreasing);
  return prof;
}

std::vector<TrappedOrbit> find_trapped_rays(const Scenario& sc,
                                            const BoundaryArc& gamma1,
                                            const BoundaryArc& gamma2,
                                            double horizon, int n_s,
                                            int n_theta) {
  constexpr int kMaxReturns = 16;
  constexpr double kNearReturn = 0.4;  // seed-space near-return threshold
  constexpr int kMaxPolish = 3;        // Newton attempts per seed

  std::vector<TrappedOrbit> orbits;
  // Polish a candidate, certify it, and keep it unless already known.
  const auto consider = [&](const WallState& guess, int period) -> bool {
    const auto polished = polish_orbit(sc, gamma1, gamma2, guess, period);
    if (!polished) return false;
    auto orbit = certify_orbit(sc, gamma1, gamma2, polished->first, period);
    if (!orbit) return false;
    const auto dup =
        std::find_if(orbits.begin(), orbits.end(), [&](const TrappedOrbit& o) {
          return same_orbit(*orbit, o);
        });
    if (dup == orbits.end()) orbits.push_back(std::move(*orbit));
    return true;
  };

  // Symmetry pre-pass: a retroreflected cycle meets the wall at exactly
  // pi/2, so it is a root of f(s) = (outgoing angle one return after a
  // normal launch) - pi/2. Bisecting grid sign changes pins such cycles even
  // when the defocusing instability pushes every Newton seed into the basin
  // of a neighbouring orbit.
  const double half = kPi / 2;
  const auto retro_gap = [&](double s) -> std::optional<double> {
    try {
      return wall_return(sc, gamma1, gamma2, {s, half}).state.theta - half;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  std::vector<std::optional<double>> gap(static_cast<size_t>(n_s));
  for (int i = 0; i < n_s; ++i) {
    const double s0 = static_cast<double>(i) / n_s;
    if (!gamma1.contains(s0)) gap[static_cast<size_t>(i)] = retro_gap(s0);
  }
  for (int i = 0; i < n_s; ++i) {
    const auto fa = gap[static_cast<size_t>(i)];
    if (!fa) continue;
    if (std::abs(*fa) < 1e-9) {
      consider({static_cast<double>(i) / n_s, half}, 2);
      continue;
    }
    const auto fb = gap[static_cast<size_t>((i + 1) % n_s)];
    // Skip brackets spanning a discontinuity jump; genuine roots are rechecked
    // by the residual test after bisection anyway.
    if (!fb || *fa * *fb >= 0.0 || std::abs(*fa) + std::abs(*fb) > 1.0) continue;
    double a = static_cast<double>(i) / n_s, b = static_cast<double>(i + 1) / n_s;
    double va = *fa;
    bool ok = true;
    for (int it = 0; it < 60 && ok; ++it) {
      const double m = 0.5 * (a + b);
      const auto vm = retro_gap(m);
      if (!vm) {
        ok = false;
        break;
      }
      if (va * *vm <= 0.0) {
        b = m;
      } else {
        a = m;
        va = *vm;
      }
    }
    if (!ok) continue;
    const double root = 0.5 * (a + b);
    const auto res = retro_gap(root);
    if (res && std::abs(*res) < 1e-9) consider({wrap_param(root), half}, 2);
  }

  // General pass: march every grid seed through the wall map and hand
  // near-returns to the Newton polish.
  for (int i = 0; i < n_s; ++i) {
    const double s0 = static_cast<double>(i) / n_s;
    if (gamma1.contains(s0)) continue;
    for (int j = 1; j < n_theta; ++j) {
      const WallState seed{s0, kPi * j / n_theta};
      WallState cur = seed;
      double time = 0.0;
      int attempts = 0;
      try {
        for (int k = 1; k <= kMaxReturns && time <= horizon; ++k) {
          const ReturnStep step = wall_return(sc, gamma1, gamma2, cur);
          if (step.touched_gamma1 || step.touched_gamma2) break;
          time += step.length / sc.c1;
          cur = step.state;
          const double dist = std::hypot(signed_diff(cur.s, seed.s),
                                         cur.theta - seed.theta);
          if (dist >= kNearReturn) continue;
          if (++attempts > kMaxPolish) break;
          if (consider(seed, k)) break;  // one orbit candidate per seed
        }
      } catch (const Error&) {
        continue;  // degenerate seed (grazing flight, stuck ray, ...)
      }
    }
  }
  return orbits;
}

TransmissionReport check_transmission_capture(const Scenario& sc,
                                              const BoundaryArc& gamma1,
                                              const BoundaryArc& gamma2,
                                              int n_s, int n_theta) {
  const BoundaryCurve& inner = inner_of(sc);
  TransmissionReport rep;
  const BoundaryArc launch = gamma1.complement();
  if (launch.empty() || n_s <= 0 || n_theta <= 1) {
    rep.holds = true;
    return rep;
  }
  const double skip = 1e-9 * (1.0 + inner.r_max());
  for (int i = 0; i < n_s; ++i) {
    const double s = wrap_param(launch.lo + launch.span * (i + 0.5) / n_s);
    for (int j = 1; j < n_theta; ++j) {
      const double theta = kPi * j / n_theta;
      try {
        const PhasePoint p0 =
            boundary_phase(sc, Surface::Wall, s, theta, Medium::Shell);
        const Collision first = collision_shell(sc, p0);
        if (first.surface != Surface::Interface) continue;
        if (gamma2.contains(first.hit.s)) continue;
        const Collision second = collision_shell(sc, first.reflected);
        if (second.surface != Surface::Wall) continue;
        if (gamma1.contains(second.hit.s)) continue;
        ++rep.checked;

        TransmissionViolation v;
        v.wall_s = s;
        v.theta = theta;
        v.inner_s = first.hit.s;
        const CurveFrame f = inner.frame_at(first.hit.s);
        const auto forward = refract(p0.dir, f.normal, sc.c1, sc.c2);
        if (!forward) {
          v.tir = true;
          rep.violations.push_back(v);
          continue;
        }
        // Mirror the tangential component for the reversed-time branch.
        const Vec2 mirrored =
            forward->vec() - 2.0 * dot(*forward, f.tangent) * f.tangent;
        const Dir2 backward{mirrored};
        const auto exit_f =
            inner.intersect_ray(first.hit.point, *forward, skip);
        const auto exit_b =
            inner.intersect_ray(first.hit.point, backward, skip);
        if (!exit_f || !exit_b) {
          rep.violations.push_back(v);
          continue;
        }
        v.exit_forward = exit_f->s;
        v.exit_backward = exit_b->s;
        if (!gamma2.contains(v.exit_forward) || !gamma2.contains(v.exit_backward))
          rep.violations.push_back(v);
      } catch (const Error&) {
        continue;
      }
    }
  }
  rep.holds = rep.violations.empty();
  return rep;
}

}  // namespace raysplit
