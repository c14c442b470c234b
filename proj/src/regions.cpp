#include "raysplit/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "raysplit/errors.hpp"
#include "raysplit/tracer.hpp"

namespace raysplit {

namespace {

// Wrapped parameter difference mapped to (-0.5, 0.5].
double signed_diff(double a, double b) {
  const double d = wrap_param(a - b);
  return d > 0.5 ? d - 1.0 : d;
}

const BoundaryCurve& inner_of(const Scenario& sc) {
  if (!sc.has_inner())
    throw ScenarioError("arc construction requires an inclusion");
  return *sc.inner;
}

// Wall parameter hit by the outward-normal ray leaving the inclusion at psi.
double landing_param(const Scenario& sc, double psi) {
  const BoundaryCurve& inner = inner_of(sc);
  const auto h = sc.outer.intersect_ray(inner.point_at(psi),
                                        inner.frame_at(psi).normal, sc.tol.geom);
  if (!h) throw ConstructionError("outward normal ray escaped the wall");
  return h->s;
}

// Inclusion parameter first struck by the inward-normal ray from wall
// parameter s, when that ray meets the inclusion at all.
std::optional<double> inward_hit_param(const Scenario& sc, double s) {
  const BoundaryCurve& inner = inner_of(sc);
  const auto h = inner.intersect_ray(sc.outer.point_at(s),
                                     sc.outer.frame_at(s).normal.reversed(),
                                     sc.tol.geom);
  if (!h) return std::nullopt;
  return h->s;
}

// Second crossing of the inclusion by the line from A through the boundary
// point at base_param; nothing when the line only touches there.
std::optional<double> second_crossing(const Scenario& sc, const Vec2& A,
                                      double base_param) {
  const BoundaryCurve& inner = inner_of(sc);
  const Vec2 B = inner.point_at(base_param);
  const Dir2 d{B - A};
  const auto h1 = inner.intersect_ray(A, d, sc.tol.geom);
  if (!h1) return std::nullopt;
  const auto h2 = inner.intersect_ray(A, d, h1->distance + 1e-9);
  if (!h2) return std::nullopt;
  const double match = 1e-6;
  const bool first_is_base = param_distance(h1->s, base_param) < match;
  const bool second_is_base = param_distance(h2->s, base_param) < match;
  if (first_is_base == second_is_base) return std::nullopt;  // grazing or degenerate
  return first_is_base ? h2->s : h1->s;
}

// Direction after two bounces of the inward-normal ray equals the launch
// direction: the ray retraces itself forever (both contacts perpendicular).
bool retro_normal(const Scenario& sc, double s) {
  PhasePoint p;
  p.surface = Surface::Wall;
  p.s = s;
  p.position = sc.outer.point_at(s);
  p.dir = sc.outer.frame_at(s).normal.reversed();
  p.medium = Medium::Shell;
  try {
    const Collision c1 = collision_shell(sc, p);
    const Collision c2 = collision_shell(sc, c1.reflected);
    const double c = std::clamp(dot(c2.reflected.dir, p.dir), -1.0, 1.0);
    return std::acos(c) < std::max(sc.tol.angle, 1e-9);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

BoundaryArc shadow_arc(const BoundaryCurve& curve, const Vec2& source) {
  const auto [ta, tb] = curve.tangent_params_from(source);
  auto faces_away = [&](const BoundaryArc& a) {
    const double m = a.midpoint();
    return dot(curve.point_at(m) - source, curve.frame_at(m).normal.vec()) > 0.0;
  };
  const BoundaryArc fwd = BoundaryArc::between(ta, tb);
  if (faces_away(fwd)) return fwd;
  const BoundaryArc rev = BoundaryArc::between(tb, ta);
  if (faces_away(rev)) return rev;
  throw ConstructionError("shadow arc orientation undecidable");
}

InclusionCosine inclusion_cosine(const Scenario& sc, double s, double sign) {
  const BoundaryCurve& inner = inner_of(sc);
  const Vec2 p = sc.outer.point_at(s);
  const Vec2 u = (sign >= 0.0 ? 1.0 : -1.0) * sc.outer.frame_at(s).tangent.vec();
  // Directions from a wall point to the inclusion form a cone strictly on
  // the inward side of the wall tangent line, so the largest cosine against
  // a tangential direction is always attained at a cone edge, i.e. at one
  // of the two tangency points of the inclusion seen from p.
  const auto [ta, tb] = inner.tangent_params_from(p);
  InclusionCosine best{-std::numeric_limits<double>::infinity(), 0.0};
  for (const double t : {ta, tb}) {
    const Vec2 x = inner.point_at(t);
    const double c = dot(Dir2{x - p}.vec(), u);
    if (c > best.value) best = {c, t};
  }
  return best;
}

namespace {

// Widen one endpoint of the wall arc: march away from the arc while the
// inclusion still reaches past the local normal line, stopping at the first
// parameter where the inward-normal sightline grazes the inclusion.
double widen_wall_endpoint(const Scenario& sc, double s_end, double out_sign,
                           bool* degenerate) {
  if (inclusion_cosine(sc, s_end, out_sign).value <= 0.0) return s_end;
  const double into = -out_sign;
  auto f = [&](double swept) {
    return inclusion_cosine(sc, wrap_param(s_end + out_sign * swept), into).value;
  };
  if (f(0.0) >= 0.0) {  // normal line already meets the inclusion: cannot widen
    if (degenerate) *degenerate = true;
    return s_end;
  }
  const double step = 1.0 / 1024.0;
  double prev = 0.0;
  for (double swept = step; swept <= 0.5 + 1e-12; swept += step) {
    if (f(swept) >= 0.0) {
      double a = prev, b = swept;
      for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        if (f(m) >= 0.0)
          b = m;
        else
          a = m;
      }
      return wrap_param(s_end + out_sign * 0.5 * (a + b));
    }
    prev = swept;
  }
  if (degenerate) *degenerate = true;  // no grazing root within half a perimeter
  return s_end;
}

}  // namespace

BoundaryArc initial_wall_arc(const Scenario& sc, const Vec2& source,
                             ArcGrowthFlags* flags) {
  const BoundaryArc base = shadow_arc(sc.outer, source);
  if (!sc.has_inner()) return base;
  ArcGrowthFlags local;
  const double lo = widen_wall_endpoint(sc, base.lo, -1.0, &local.lo_degenerate);
  const double hi = widen_wall_endpoint(sc, base.hi(), +1.0, &local.hi_degenerate);
  if (flags) *flags = local;
  const BoundaryArc widened = BoundaryArc::between(lo, hi);
  if (widened.span < base.span - 1e-12 || widened.span >= 1.0)
    throw ConstructionError("wall arc widening left its admissible range");
  return widened;
}

BoundaryArc initial_inner_arc(const Scenario& sc, const BoundaryArc& wall_arc) {
  const double a = inclusion_cosine(sc, wall_arc.lo, +1.0).inner_param;
  const double b = inclusion_cosine(sc, wall_arc.hi(), -1.0).inner_param;
  if (param_distance(a, b) < sc.tol.arc)
    throw ConstructionError("inclusion arc collapsed to a point");
  auto faces_wall_arc = [&](const BoundaryArc& arc) {
    return wall_arc.contains(landing_param(sc, arc.midpoint()));
  };
  const BoundaryArc fwd = BoundaryArc::between(a, b);
  if (faces_wall_arc(fwd)) return fwd;
  const BoundaryArc rev = BoundaryArc::between(b, a);
  if (faces_wall_arc(rev)) return rev;
  throw ConstructionError("no inclusion arc side faces the wall arc");
}

namespace {

// Push one inclusion endpoint outward toward the second line crossing,
// truncated at the first parameter whose outward-normal ray leaves wall_arc.
double grow_inner_endpoint(const Scenario& sc, const BoundaryArc& wall_arc,
                           double cur_end, double out_sign, const Vec2& wall_pt,
                           double base_param, bool* line_hit) {
  const auto cand = second_crossing(sc, wall_pt, base_param);
  if (!cand) return cur_end;
  if (line_hit) *line_hit = true;
  const double zone = wrap_param(out_sign * (*cand - cur_end));
  if (zone <= sc.tol.arc || zone >= 0.5) return cur_end;
  auto ok = [&](double swept) {
    return wall_arc.contains(
        landing_param(sc, wrap_param(cur_end + out_sign * swept)));
  };
  const int n_steps = 256;
  const double step = zone / n_steps;
  double good = 0.0;
  for (int k = 1; k <= n_steps; ++k) {
    const double swept = k * step;
    if (!ok(swept)) {
      double a = good, b = swept;
      for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        if (ok(m))
          a = m;
        else
          b = m;
      }
      return wrap_param(cur_end + out_sign * a);
    }
    good = swept;
  }
  return wrap_param(cur_end + out_sign * zone);
}

}  // namespace

BoundaryArc grow_inner_arc(const Scenario& sc, const BoundaryArc& wall_arc,
                           const BoundaryArc& inner_arc, bool* any_line_hit) {
  bool hit = false;
  const double lo =
      grow_inner_endpoint(sc, wall_arc, inner_arc.lo, -1.0,
                          sc.outer.point_at(wall_arc.lo), inner_arc.hi(), &hit);
  const double hi =
      grow_inner_endpoint(sc, wall_arc, inner_arc.hi(), +1.0,
                          sc.outer.point_at(wall_arc.hi()), inner_arc.lo, &hit);
  if (any_line_hit) *any_line_hit = hit;
  const BoundaryArc grown = BoundaryArc::between(lo, hi);
  if (!grown.contains_arc(inner_arc, sc.tol.arc) || grown.span >= 1.0)
    throw ConstructionError("inclusion arc growth lost monotonicity");
  return grown;
}

namespace {

// Push one wall endpoint outward to the farthest parameter whose
// inward-normal ray strikes the inclusion exactly at `target`.
double grow_wall_endpoint(const Scenario& sc, double cur_end, double out_sign,
                          double target) {
  auto g = [&](double swept) -> std::optional<double> {
    const auto hit = inward_hit_param(sc, wrap_param(cur_end + out_sign * swept));
    if (!hit) return std::nullopt;
    return signed_diff(*hit, target);
  };
  const auto g0 = g(0.0);
  if (g0 && std::abs(*g0) < 1e-8) return cur_end;  // already strikes the target
  const double step = 1.0 / 2048.0;
  std::optional<double> prev = g0;
  double prev_swept = 0.0;
  for (double swept = step; swept <= 0.25 + 1e-12; swept += step) {
    const auto cur = g(swept);
    if (prev && cur && (*prev < 0.0) != (*cur < 0.0) &&
        std::abs(*prev) + std::abs(*cur) < 0.25) {
      double a = prev_swept, b = swept;
      bool a_neg = *prev < 0.0;
      for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        const auto gm = g(m);
        if (!gm) {
          b = m;  // hole in the bracket: shrink and let the final check decide
          continue;
        }
        if ((*gm < 0.0) == a_neg)
          a = m;
        else
          b = m;
      }
      const double root_swept = 0.5 * (a + b);
      const auto gr = g(root_swept);
      if (gr && std::abs(*gr) < 1e-6)
        return wrap_param(cur_end + out_sign * root_swept);
      // wrap artifact, not a crossing: keep marching
    }
    prev = cur;
    prev_swept = swept;
  }
  return cur_end;
}

}  // namespace

BoundaryArc grow_outer_arc(const Scenario& sc, const BoundaryArc& wall_arc,
                           const BoundaryArc& inner_arc) {
  const double lo = grow_wall_endpoint(sc, wall_arc.lo, -1.0, inner_arc.lo);
  const double hi = grow_wall_endpoint(sc, wall_arc.hi(), +1.0, inner_arc.hi());
  const BoundaryArc grown = BoundaryArc::between(lo, hi);
  if (!grown.contains_arc(wall_arc, sc.tol.arc) || grown.span >= 1.0)
    throw ConstructionError("wall arc growth lost monotonicity");
  return grown;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::NormalParallel: return "normal_parallel";
    case StopReason::NoLineIntersection: return "no_line_intersection";
    case StopReason::Budget: return "budget";
  }
  return "unknown";
}

ResidualRegion residual_region(const Scenario& sc, const BoundaryArc& wall_arc,
                               const BoundaryArc& inner_arc) {
  const BoundaryCurve& inner = inner_of(sc);
  ResidualRegion r;
  r.wall_unobserved = wall_arc.complement();
  r.inner_unobserved = inner_arc.complement();
  r.bridges[0] = {sc.outer.point_at(wall_arc.lo), inner.point_at(inner_arc.lo)};
  r.bridges[1] = {sc.outer.point_at(wall_arc.hi()), inner.point_at(inner_arc.hi())};
  return r;
}

ConstructionState build_observed_arcs(const Scenario& sc, const Vec2& source,
                                      int max_iter) {
  inner_of(sc);  // validates the inclusion exists
  if (max_iter <= 0) max_iter = sc.caps.max_iter;
  ConstructionState st;
  st.source = source;
  st.base_arc = shadow_arc(sc.outer, source);
  st.wall_arc = initial_wall_arc(sc, source, &st.start_flags);
  st.inner_arc = initial_inner_arc(sc, st.wall_arc);
  st.history.push_back({0, st.wall_arc, st.inner_arc});

  bool settled = false;
  for (int n = 1; n <= max_iter; ++n) {
    const BoundaryArc g2 = grow_inner_arc(sc, st.wall_arc, st.inner_arc);
    if (arc_hausdorff(g2, st.inner_arc) <= sc.tol.arc) {
      // The inclusion arc stopped moving: the construction has settled, and
      // the wall arc keeps its last value.
      st.history.push_back({n, st.wall_arc, g2});
      st.iterations = n;
      settled = true;
      break;
    }
    // The wall extension aims at the inclusion endpoints from before this
    // round's growth; the fresh endpoints only become targets next round.
    // Aiming at the fresh ones lets the two arcs leapfrog each other
    // indefinitely instead of settling.
    const BoundaryArc g1 = grow_outer_arc(sc, st.wall_arc, st.inner_arc);
    st.history.push_back({n, g1, g2});
    st.wall_arc = g1;
    st.inner_arc = g2;
    st.iterations = n;
  }
  if (!settled)
    throw IterationBudgetError(
        "arc construction did not settle within the iteration budget");

  st.reason = (retro_normal(sc, st.wall_arc.lo) ||
               retro_normal(sc, st.wall_arc.hi()))
                  ? StopReason::NormalParallel
                  : StopReason::NoLineIntersection;
  st.residual = residual_region(sc, st.wall_arc, st.inner_arc);
  return st;
}

Vec2 witness_source(const Scenario& sc, const BoundaryArc& inner_arc,
                    const BoundaryArc* wall_arc) {
  const BoundaryCurve& inner = inner_of(sc);
  if (inner_arc.empty() || inner_arc.full())
    throw ConstructionError("witness needs a proper inclusion arc");

  struct Line {
    Vec2 p;
    Vec2 d;
  };
  const double e0 = inner_arc.lo, e1 = inner_arc.hi();
  const Vec2 P0 = inner.point_at(e0), P1 = inner.point_at(e1);
  std::vector<Line> cand0{{P0, inner.frame_at(e0).tangent.vec()}};
  std::vector<Line> cand1{{P1, inner.frame_at(e1).tangent.vec()}};
  if (wall_arc) {
    // Each endpoint also admits the construction line through the opposite
    // wall endpoint, used when the tangent pairing degenerates.
    cand0.push_back({sc.outer.point_at(wall_arc->hi()),
                     P0 - sc.outer.point_at(wall_arc->hi())});
    cand1.push_back({sc.outer.point_at(wall_arc->lo),
                     P1 - sc.outer.point_at(wall_arc->lo)});
  }

  double best_h = std::numeric_limits<double>::infinity();
  for (const Line& a : cand0) {
    for (const Line& b : cand1) {
      const double den = cross(a.d, b.d);
      if (std::abs(den) < 1e-12) continue;
      const double u = cross(b.p - a.p, b.d) / den;
      const Vec2 x = a.p + u * a.d;
      if (inner.contains(x)) continue;
      try {
        const double h = arc_hausdorff(shadow_arc(inner, x), inner_arc);
        if (h <= sc.tol.witness) return x;
        best_h = std::min(best_h, h);
      } catch (const InsidePointError&) {
        continue;
      }
    }
  }
  throw WitnessMismatchError(
      "no exterior point reproduces the inclusion arc (best endpoint gap " +
          std::to_string(best_h) + " in parameter)",
      best_h);
}

}  // namespace raysplit
