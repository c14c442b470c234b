#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "raysplit/arc.hpp"
#include "raysplit/geometry.hpp"
#include "raysplit/optics.hpp"
#include "raysplit/scenario.hpp"
#include "raysplit/vec2.hpp"

namespace raysplit {

/// State of a ray the instant it leaves a boundary point: position on the
/// named boundary, unit direction pointing into `medium`, and the time at
/// which it departs (relative to the trace root).
struct PhasePoint {
  Surface surface = Surface::Wall;
  double s = 0.0;
  Vec2 position;
  Dir2 dir{Vec2{1.0, 0.0}};
  Medium medium = Medium::Shell;
  double time = 0.0;
};

/// Build a phase point on a boundary. `theta` is measured from the
/// counter-clockwise tangent, in (0, pi); theta = pi/2 launches along the
/// normal into the requested medium.
PhasePoint boundary_phase(const Scenario& sc, Surface surface, double s,
                          double theta, Medium medium);

/// One application of the shell/core first-return map: fly straight from `p`
/// to the next boundary and reflect specularly (the inclusion acts as a hard
/// obstacle here; no transmission).
struct Collision {
  Surface surface = Surface::Wall;  // boundary that was hit
  RayHit hit;
  double theta = 0.0;  // incidence from the normal
  PhasePoint reflected;
};
Collision collision_shell(const Scenario& sc, const PhasePoint& p);
Collision collision_core(const Scenario& sc, const PhasePoint& p);

/// The four half-ray slots of a boundary event. Wall events and total
/// internal reflections only use the two shell slots; transmissions and
/// critical events use all four (for critical events the core pair holds the
/// gliding handles).
enum SlotId : int { kShellIn = 0, kCoreIn = 1, kShellOut = 2, kCoreOut = 3 };

inline bool slot_is_incoming(SlotId s) { return s == kShellIn || s == kCoreIn; }
inline Medium slot_medium(SlotId s) {
  return (s == kShellIn || s == kShellOut) ? Medium::Shell : Medium::Core;
}
/// Number of half-ray slots an event of this kind carries (2 or 4).
int slot_count(EventKind kind);

enum class LeafStatus {
  None,          // edge ends at another event
  HitGamma,      // edge reached the observation arc (tracing pruned there)
  TimeExpired,   // truncated by the horizon
  DepthExpired,  // child would exceed the transmission depth cap
  GlidingEnd,    // gliding chain truncated
  BudgetExpired, // soft event budget reached; the far event was not built
};

/// A half-ray: one straight segment (or gliding arc) between two events, or
/// between an event and a leaf annotation. Chronology: t0 < t1 always, with
/// p0/p1 the matching endpoints; backward-grown edges simply have t1 at the
/// parent event.
struct HalfRay {
  int from_event = -1;  // event this edge was grown from
  SlotId slot = kShellIn;
  int to_event = -1;  // -1 for leaves
  LeafStatus leaf = LeafStatus::None;
  Medium medium = Medium::Shell;
  bool backward = false;  // grown against time
  bool is_glide = false;  // arc along the interface instead of a segment
  Vec2 p0, p1;
  double t0 = 0.0, t1 = 0.0;
  double length = 0.0;
  int depth = 0;  // medium switches accumulated from the root
};

/// A boundary event with its four (or two) slots. `slot_edge[i]` holds the
/// edge attached to slot i, -1 for an unexplored stub (stubs stay Unknown in
/// the observation fixpoint).
struct EventNode {
  EventKind kind = EventKind::WallReflection;
  Surface surface = Surface::Wall;
  double s = 0.0;
  Vec2 point;
  double time = 0.0;
  double theta1 = 0.0;  // incidence on the shell side
  double theta2 = 0.0;  // core-side angle; NaN when no core branch exists
  Dir2 normal{Vec2{1.0, 0.0}};  // outward normal of the hit curve
  Dir2 t_hat{Vec2{0.0, 1.0}};   // tangential direction shared by all slots
  int depth = 0;
  Medium in_medium = Medium::Shell;  // medium of the edge that found the event
  int arrival_slot = -1;             // slot occupied by that edge, -1 at the root
  std::array<int, 4> slot_edge{-1, -1, -1, -1};
};

/// Travel direction of a slot's ray (incoming slots: direction of arrival).
Dir2 slot_direction(const EventNode& ev, SlotId slot);

struct TraceOptions {
  double horizon = 100.0;
  int depth_cap = 8;
  long max_events = 100000;
  bool reverse = false;  // also grow incoming slots backward in time
  // Trees are grown breadth-first in creation order, so with `soft_budget`
  // an exhausted event budget truncates the far fringe (BudgetExpired
  // leaves) instead of throwing; the near part of the tree stays intact.
  bool soft_budget = false;
  std::optional<BoundaryArc> prune_arc;  // wall arc that absorbs (and marks) hits
  double glide_spacing = 0.0;            // 0 = perimeter/256 of the inner curve

  static TraceOptions from(const Scenario& sc) {
    TraceOptions o;
    o.horizon = sc.caps.horizon;
    o.depth_cap = sc.caps.depth_cap;
    o.max_events = sc.caps.max_events;
    o.glide_spacing = sc.sampling.glide_spacing;
    return o;
  }
};

/// The ray tree grown from one phase point. events[0] is the synthetic root
/// event at the phase point's location; `root_slot` is the slot whose edge
/// carries the root direction forward.
struct RayTree {
  PhasePoint root;
  int root_slot = kShellOut;
  std::vector<EventNode> events;
  std::vector<HalfRay> edges;

  const EventNode& root_event() const { return events.front(); }
  int root_edge() const { return events.front().slot_edge[root_slot]; }
};

/// Grow the generalized-ray tree from p0: straight flights at the medium
/// speed, specular wall bounces, reflection/transmission splitting at the
/// interface, total internal reflection, tangential passes, and critical
/// gliding with transmitted germs emitted every glide_spacing of arc. With
/// `reverse` the incoming slots are also explored against time, so the tree
/// covers every half-ray the event graph connects to p0 within the horizon
/// and depth budget. Throws EventBudgetError past max_events.
RayTree trace(const Scenario& sc, const PhasePoint& p0, const TraceOptions& opts);

/// One CSV row per event, in creation order (deterministic for a fixed
/// scenario): time,boundary,s,kind,theta1,theta2,depth.
void write_event_csv(const RayTree& tree, std::ostream& out);

}  // namespace raysplit
