#include "raysplit/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "raysplit/errors.hpp"

namespace raysplit {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kNan = std::numeric_limits<double>::quiet_NaN();

const BoundaryCurve& curve_of(const Scenario& sc, Surface surf) {
  if (surf == Surface::Wall) return sc.outer;
  if (!sc.inner) throw ScenarioError("interface query without an inner curve");
  return *sc.inner;
}

struct Flight {
  Surface surface;
  RayHit hit;
};

// First boundary contact of a straight flight in medium m.
std::optional<Flight> first_hit(const Scenario& sc, const Vec2& x, const Dir2& d,
                                Medium m, double skip) {
  if (m == Medium::Core) {
    auto h = sc.inner->intersect_ray(x, d, skip);
    if (!h) return std::nullopt;
    return Flight{Surface::Interface, *h};
  }
  auto hw = sc.outer.intersect_ray(x, d, skip);
  if (sc.has_inner()) {
    auto hi = sc.inner->intersect_ray(x, d, skip);
    if (hi && (!hw || hi->distance < hw->distance))
      return Flight{Surface::Interface, *hi};
  }
  if (!hw) return std::nullopt;
  return Flight{Surface::Wall, *hw};
}

double incidence_of(const Dir2& d, const Dir2& n) {
  return std::acos(std::clamp(std::abs(dot(d, n)), 0.0, 1.0));
}

Collision collide(const Scenario& sc, const PhasePoint& p, Medium m) {
  auto fl = first_hit(sc, p.position, p.dir, m, sc.tol.geom);
  if (!fl) throw StuckRayError("flight found no boundary ahead");
  const BoundaryCurve& c = curve_of(sc, fl->surface);
  const CurveFrame f = c.frame_at(fl->hit.s);
  Collision out;
  out.surface = fl->surface;
  out.hit = fl->hit;
  out.theta = incidence_of(p.dir, f.normal);
  out.reflected.surface = fl->surface;
  out.reflected.s = fl->hit.s;
  out.reflected.position = fl->hit.point;
  out.reflected.dir = reflect(p.dir, f.normal);
  out.reflected.medium = m;
  out.reflected.time = p.time + fl->hit.distance / sc.speed(m);
  return out;
}

}  // namespace

PhasePoint boundary_phase(const Scenario& sc, Surface surface, double s,
                          double theta, Medium medium) {
  if (surface == Surface::Wall && medium != Medium::Shell)
    throw ScenarioError("wall phase points live in the shell medium");
  const BoundaryCurve& c = curve_of(sc, surface);
  const CurveFrame f = c.frame_at(s);
  // Rotate away from the ccw tangent, towards the side the medium is on.
  const double into = (surface == Surface::Wall || medium == Medium::Core) ? -1.0 : 1.0;
  const Vec2 d = std::cos(theta) * f.tangent.vec() + into * std::sin(theta) * f.normal.vec();
  PhasePoint p;
  p.surface = surface;
  p.s = wrap_param(s);
  p.position = c.point_at(s);
  p.dir = Dir2(d);
  p.medium = medium;
  p.time = 0.0;
  return p;
}

Collision collision_shell(const Scenario& sc, const PhasePoint& p) {
  return collide(sc, p, Medium::Shell);
}

Collision collision_core(const Scenario& sc, const PhasePoint& p) {
  if (!sc.has_inner()) throw ScenarioError("core collision without an inner curve");
  return collide(sc, p, Medium::Core);
}

int slot_count(EventKind kind) {
  switch (kind) {
    case EventKind::ReflectTransmit:
    case EventKind::CriticalGliding:
      return 4;
    default:
      return 2;
  }
}

Dir2 slot_direction(const EventNode& ev, SlotId slot) {
  const bool core_slot = slot == kCoreIn || slot == kCoreOut;
  const double th = core_slot ? ev.theta2 : ev.theta1;
  const double c = std::cos(th), s = std::sin(th);
  // Sign of the travel direction's normal component.
  double sign;
  if (ev.surface == Surface::Wall)
    sign = (slot == kShellIn) ? 1.0 : -1.0;  // arrive moving outward, leave inward
  else if (slot == kShellIn || slot == kCoreOut)
    sign = -1.0;  // toward the core
  else
    sign = 1.0;  // away from the core
  return Dir2(sign * c * ev.normal.vec() + s * ev.t_hat.vec());
}

namespace {

bool slot_available(const EventNode& ev, SlotId slot) {
  switch (ev.kind) {
    case EventKind::ReflectTransmit:
    case EventKind::CriticalGliding:
      return true;
    case EventKind::Diffractive:
    case EventKind::TotalInternalReflection:
      // the pair of slots on the side the ray lives on
      return slot_medium(slot) == ev.in_medium;
    default:  // wall reflection (wall gliding never appears in traces)
      return slot_medium(slot) == Medium::Shell;
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const Scenario& sc, const TraceOptions& o) : sc_(sc), o_(o) {
    if (sc_.has_inner()) {
      glide_ds_ = o_.glide_spacing > 0.0 ? o_.glide_spacing
                                         : sc_.inner->perimeter() / 256.0;
    }
    prune_margin_ = sc_.tol.geom / sc_.outer.perimeter();
  }

  RayTree run(const PhasePoint& p0) {
    tree_.root = p0;
    make_root(p0);
    for (std::size_t i = 0; i < tree_.events.size(); ++i) explore(static_cast<int>(i));
    return std::move(tree_);
  }

 private:
  // ---- event construction -------------------------------------------------

  /// Fill the angular data of an event given the travel direction `w` of the
  /// ray occupying it and the medium that ray lives in.
  void set_angles(EventNode& ev, const Dir2& w, Medium m, bool grazing) {
    const Vec2 tang = w.vec() - dot(w, ev.normal) * ev.normal.vec();
    const double st = tang.norm();
    ev.t_hat = st > 1e-13 ? Dir2(tang) : curve_of(sc_, ev.surface).frame_at(ev.s).tangent;
    const double theta = incidence_of(w, ev.normal);

    if (ev.surface == Surface::Wall) {
      ev.kind = EventKind::WallReflection;
      ev.theta1 = theta;
      ev.theta2 = kNan;
      return;
    }
    ev.kind = classify_hit(ev.surface, m, theta, grazing, sc_.c1, sc_.c2, sc_.tol.angle);
    if (ev.kind == EventKind::Diffractive) {
      // Straight tangential pass: encode the exact travel line so both slots
      // reproduce it (theta = pi/2 zeroes the normal component).
      ev.t_hat = w;
      if (m == Medium::Shell) {
        ev.theta1 = kPi / 2;
        ev.theta2 = kNan;
      } else {
        ev.theta2 = kPi / 2;
        ev.theta1 = kNan;
      }
      return;
    }
    if (m == Medium::Shell) {
      ev.theta1 = theta;
      switch (ev.kind) {
        case EventKind::ReflectTransmit:
          ev.theta2 = std::asin(std::min(1.0, std::sin(theta) * sc_.c2 / sc_.c1));
          break;
        case EventKind::CriticalGliding:
          ev.theta1 = sc_.critical();  // snap to the exact critical angle
          ev.theta2 = kPi / 2;
          break;
        default:  // total internal reflection: no core branch
          ev.theta2 = kNan;
          break;
      }
    } else {
      ev.theta2 = theta;
      // Transmitted shell angle; absent when a slow inclusion reflects back.
      ev.theta1 = ev.kind == EventKind::ReflectTransmit
                      ? std::asin(std::min(1.0, std::sin(theta) * sc_.c1 / sc_.c2))
                      : kNan;
    }
  }

  int add_event(EventNode ev) {
    if (static_cast<long>(tree_.events.size()) >= o_.max_events)
      throw EventBudgetError("trace exceeded its event budget");
    tree_.events.push_back(ev);
    return static_cast<int>(tree_.events.size()) - 1;
  }

  int add_edge(const HalfRay& e) {
    tree_.edges.push_back(e);
    const int idx = static_cast<int>(tree_.edges.size()) - 1;
    tree_.events[e.from_event].slot_edge[e.slot] = idx;
    return idx;
  }

  void make_root(const PhasePoint& p0) {
    if (p0.medium == Medium::Core && !sc_.has_inner())
      throw ScenarioError("core phase point without an inner curve");
    EventNode ev;
    ev.surface = p0.surface;
    ev.s = wrap_param(p0.s);
    ev.point = p0.position;
    ev.time = p0.time;
    ev.depth = 0;
    ev.in_medium = p0.medium;
    ev.arrival_slot = -1;
    const BoundaryCurve& c = curve_of(sc_, p0.surface);
    ev.normal = c.frame_at(ev.s).normal;
    const bool grazing =
        std::abs(dot(p0.dir, ev.normal)) < std::sin(BoundaryCurve::kTangencyTol);
    set_angles(ev, p0.dir, p0.medium, grazing);
    tree_.root_slot = (p0.surface != Surface::Wall && p0.medium == Medium::Core)
                          ? kCoreOut
                          : kShellOut;
    add_event(ev);
  }

  // ---- exploration ---------------------------------------------------------

  void explore(int ei) {
    static const SlotId kOrder[4] = {kShellOut, kCoreOut, kShellIn, kCoreIn};
    for (SlotId slot : kOrder) {
      const EventNode ev = tree_.events[ei];  // copy: spawns reallocate
      if (!slot_available(ev, slot)) continue;
      if (ev.slot_edge[slot] != -1) continue;
      if (slot_is_incoming(slot) && !o_.reverse) continue;
      if (ev.kind == EventKind::CriticalGliding && slot_medium(slot) == Medium::Core)
        spawn_glide(ei, slot);
      else
        spawn_segment(ei, slot);
    }
  }

  void leaf_edge(int ei, SlotId slot, LeafStatus why, Medium m, int depth, bool backward) {
    const EventNode& ev = tree_.events[ei];
    HalfRay e;
    e.from_event = ei;
    e.slot = slot;
    e.leaf = why;
    e.medium = m;
    e.backward = backward;
    e.p0 = e.p1 = ev.point;
    e.t0 = e.t1 = ev.time;
    e.depth = depth;
    add_edge(e);
  }

  void spawn_segment(int ei, SlotId slot) {
    const EventNode ev = tree_.events[ei];  // copy
    const bool incoming = slot_is_incoming(slot);
    const Medium m = slot_medium(slot);
    const int depth = ev.depth + (m != ev.in_medium ? 1 : 0);
    if (depth > o_.depth_cap) {
      leaf_edge(ei, slot, LeafStatus::DepthExpired, m, depth, incoming);
      return;
    }
    const double remaining = incoming ? o_.horizon + ev.time : o_.horizon - ev.time;
    if (remaining <= 0.0) {
      leaf_edge(ei, slot, LeafStatus::TimeExpired, m, depth, incoming);
      return;
    }

    const Dir2 ray_dir = slot_direction(ev, slot);  // physical travel direction
    const Dir2 grow = incoming ? ray_dir.reversed() : ray_dir;
    const double c = sc_.speed(m);
    // A flight leaving a tangential contact sits on the curve to roundoff;
    // the straight continuation can graze the same curve again within a
    // chord of order sqrt(eps). Skip past that neighbourhood (convexity
    // guarantees the true line never re-enters).
    const double skip = ev.kind == EventKind::Diffractive
                            ? 1e-6 * (1.0 + curve_of(sc_, ev.surface).r_max())
                            : sc_.tol.geom;
    auto fl = first_hit(sc_, ev.point, grow, m, skip);
    if (!fl) throw StuckRayError("trace segment found no boundary ahead");

    HalfRay e;
    e.from_event = ei;
    e.slot = slot;
    e.medium = m;
    e.backward = incoming;
    e.depth = depth;
    const double tau = fl->hit.distance / c;

    if (tau > remaining) {  // horizon truncation mid-flight
      const double len = remaining * c;
      const Vec2 tip = ev.point + len * grow.vec();
      e.leaf = LeafStatus::TimeExpired;
      e.length = len;
      if (incoming) {
        e.p0 = tip;
        e.p1 = ev.point;
        e.t1 = ev.time;
        e.t0 = ev.time - remaining;
      } else {
        e.p0 = ev.point;
        e.p1 = tip;
        e.t0 = ev.time;
        e.t1 = ev.time + remaining;
      }
      add_edge(e);
      return;
    }

    e.length = fl->hit.distance;
    if (incoming) {
      e.p0 = fl->hit.point;
      e.p1 = ev.point;
      e.t1 = ev.time;
      e.t0 = ev.time - tau;
    } else {
      e.p0 = ev.point;
      e.p1 = fl->hit.point;
      e.t0 = ev.time;
      e.t1 = ev.time + tau;
    }

    // Absorb at the observation arc: a non-grazing wall hit strictly inside
    // the arc seeds the observation fixpoint and needs no continuation.
    if (o_.prune_arc && fl->surface == Surface::Wall && !fl->hit.grazing &&
        o_.prune_arc->contains(fl->hit.s, prune_margin_)) {
      e.leaf = LeafStatus::HitGamma;
      add_edge(e);
      return;
    }

    if (fl->surface == Surface::Wall && fl->hit.grazing)
      throw GrazingWallError("interior ray grazed the outer wall");

    if (o_.soft_budget &&
        static_cast<long>(tree_.events.size()) >= o_.max_events) {
      e.leaf = LeafStatus::BudgetExpired;
      add_edge(e);
      return;
    }

    // New event: the ray occupies the matching slot there. A forward edge
    // arrives (In slot); a backward edge means the ray departed there (Out).
    EventNode nxt;
    nxt.surface = fl->surface;
    nxt.s = fl->hit.s;
    nxt.point = fl->hit.point;
    nxt.time = incoming ? ev.time - tau : ev.time + tau;
    nxt.depth = depth;
    nxt.in_medium = m;
    nxt.normal = curve_of(sc_, fl->surface).frame_at(fl->hit.s).normal;
    set_angles(nxt, ray_dir, m, fl->hit.grazing);
    SlotId occupied;
    if (m == Medium::Shell)
      occupied = incoming ? kShellOut : kShellIn;
    else
      occupied = incoming ? kCoreOut : kCoreIn;
    nxt.arrival_slot = occupied;
    const int ni = add_event(nxt);
    e.to_event = ni;
    const int edge_idx = add_edge(e);
    tree_.events[ni].slot_edge[occupied] = edge_idx;
  }

  /// One step of a gliding chain along the interface: lay a glide arc to the
  /// next emission point and create the critical event there (the worklist
  /// then extends the chain through that event's core slots).
  void spawn_glide(int ei, SlotId slot) {
    const EventNode ev = tree_.events[ei];  // copy
    const bool incoming = slot == kCoreIn;
    const int depth = ev.depth + (Medium::Core != ev.in_medium ? 1 : 0);
    if (depth > o_.depth_cap) {
      leaf_edge(ei, slot, LeafStatus::DepthExpired, Medium::Core, depth, incoming);
      return;
    }
    const double remaining = incoming ? o_.horizon + ev.time : o_.horizon - ev.time;
    if (remaining <= 0.0) {
      leaf_edge(ei, slot, LeafStatus::GlidingEnd, Medium::Core, depth, incoming);
      return;
    }

    const BoundaryCurve& ic = *sc_.inner;
    // Travel direction of the gliding ray is +t_hat; figure out whether that
    // walks the boundary parameter up or down.
    const double along = dot(ev.t_hat, ic.frame_at(ev.s).tangent) >= 0.0 ? 1.0 : -1.0;
    const double tau_step = glide_ds_ / sc_.c2;

    HalfRay e;
    e.from_event = ei;
    e.slot = slot;
    e.medium = Medium::Core;
    e.backward = incoming;
    e.is_glide = true;
    e.depth = depth;

    if (tau_step > remaining) {  // partial arc then the horizon cuts the chain
      const double len = remaining * sc_.c2;
      // chronological: forward glide advances +along, backward glide recedes
      const double dp = len / ic.perimeter() * (incoming ? -along : along);
      const Vec2 tip = ic.point_at(wrap_param(ev.s + dp));
      e.leaf = LeafStatus::GlidingEnd;
      e.length = len;
      if (incoming) {
        e.p0 = tip;
        e.p1 = ev.point;
        e.t1 = ev.time;
        e.t0 = ev.time - remaining;
      } else {
        e.p0 = ev.point;
        e.p1 = tip;
        e.t0 = ev.time;
        e.t1 = ev.time + remaining;
      }
      add_edge(e);
      return;
    }

    const double dp = glide_ds_ / ic.perimeter() * (incoming ? -along : along);
    const double s_next = wrap_param(ev.s + dp);
    const Vec2 p_next = ic.point_at(s_next);
    e.length = glide_ds_;
    if (incoming) {
      e.p0 = p_next;
      e.p1 = ev.point;
      e.t1 = ev.time;
      e.t0 = ev.time - tau_step;
    } else {
      e.p0 = ev.point;
      e.p1 = p_next;
      e.t0 = ev.time;
      e.t1 = ev.time + tau_step;
    }

    if (o_.soft_budget &&
        static_cast<long>(tree_.events.size()) >= o_.max_events) {
      e.leaf = LeafStatus::BudgetExpired;
      add_edge(e);
      return;
    }

    EventNode nxt;
    nxt.kind = EventKind::CriticalGliding;
    nxt.surface = Surface::Interface;
    nxt.s = s_next;
    nxt.point = p_next;
    nxt.time = incoming ? ev.time - tau_step : ev.time + tau_step;
    nxt.depth = depth;
    nxt.in_medium = Medium::Core;
    const CurveFrame nf = ic.frame_at(s_next);
    nxt.normal = nf.normal;
    nxt.t_hat = along > 0.0 ? nf.tangent : nf.tangent.reversed();
    nxt.theta1 = sc_.critical();
    nxt.theta2 = kPi / 2;
    // Forward chain: the glide arrives at the new point (CoreIn). Backward:
    // it departs from there towards us (CoreOut).
    const SlotId occupied = incoming ? kCoreOut : kCoreIn;
    nxt.arrival_slot = occupied;
    const int ni = add_event(nxt);
    e.to_event = ni;
    const int edge_idx = add_edge(e);
    tree_.events[ni].slot_edge[occupied] = edge_idx;
  }

  const Scenario& sc_;
  const TraceOptions& o_;
  RayTree tree_;
  double glide_ds_ = 0.0;
  double prune_margin_ = 0.0;
};

}  // namespace

RayTree trace(const Scenario& sc, const PhasePoint& p0, const TraceOptions& opts) {
  return TreeBuilder(sc, opts).run(p0);
}

void write_event_csv(const RayTree& tree, std::ostream& out) {
  out << "time,boundary,s,kind,theta1,theta2,depth\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const EventNode& ev : tree.events) {
    out << num(ev.time) << ','
        << (ev.surface == Surface::Wall ? "wall" : "interface") << ','
        << num(ev.s) << ',' << event_kind_name(ev.kind) << ',' << num(ev.theta1)
        << ',' << num(ev.theta2) << ',' << ev.depth << '\n';
  }
}

}  // namespace raysplit
