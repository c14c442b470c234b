#include "raysplit/observe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "raysplit/errors.hpp"
#include "raysplit/optics.hpp"
#include "raysplit/parallel.hpp"

namespace raysplit {
namespace {

constexpr double kPi = 3.14159265358979323846;

/// Edges truncated by the horizon, the depth cap, or a cut gliding chain
/// carry no endpoint information: they are never labelled and never count.
bool labelable(const HalfRay& e) {
  return e.leaf == LeafStatus::None || e.leaf == LeafStatus::HitGamma;
}

const BoundaryCurve& surface_curve(const Scenario& sc, Surface surf) {
  return surf == Surface::Wall ? sc.outer : *sc.inner;
}

SlotId paired_slot(int slot) {
  switch (slot) {
    case kShellIn: return kShellOut;
    case kShellOut: return kShellIn;
    case kCoreIn: return kCoreOut;
    default: return kCoreIn;
  }
}

/// Launch angle, measured from the ccw tangent in (0, pi), of a direction
/// leaving the boundary into the given medium (the boundary_phase convention
/// inverted).
double germ_angle(const CurveFrame& f, Surface surface, Medium medium,
                  const Dir2& d) {
  const double into =
      (surface == Surface::Wall || medium == Medium::Core) ? -1.0 : 1.0;
  return std::atan2(into * dot(d, f.normal), dot(d, f.tangent));
}

}  // namespace

int ObservationState::observed_count() const {
  return static_cast<int>(
      std::count(labels.begin(), labels.end(), EdgeLabel::Observed));
}

ObservationState seed_observed(const RayTree& tree, const BoundaryArc& gamma,
                               double endpoint_margin) {
  ObservationState st;
  st.labels.assign(tree.edges.size(), EdgeLabel::Unknown);
  for (std::size_t i = 0; i < tree.edges.size(); ++i) {
    const HalfRay& e = tree.edges[i];
    if (e.leaf == LeafStatus::HitGamma) {
      // Tracing already certified this endpoint: non-grazing wall hit
      // strictly inside the pruning arc.
      st.labels[i] = EdgeLabel::Observed;
      continue;
    }
    if (e.leaf != LeafStatus::None || e.to_event < 0) continue;
    const EventNode& ev = tree.events[e.to_event];
    if (ev.surface != Surface::Wall) continue;
    // Only a plain reflection deposits boundary flux; a tangential contact
    // (or a gliding germ) does not certify anything by itself.
    if (ev.kind != EventKind::WallReflection) continue;
    if (gamma.contains(ev.s, endpoint_margin)) st.labels[i] = EdgeLabel::Observed;
  }
  return st;
}

bool apply_event_rule(const RayTree& tree, int event_index,
                      ObservationState& state) {
  const EventNode& ev = tree.events[event_index];
  SlotId slots[4];
  int n = 0;
  switch (ev.kind) {
    case EventKind::ReflectTransmit:
    case EventKind::CriticalGliding:
      // Four germs; knowing any two pins down the other two.
      slots[n++] = kShellIn;
      slots[n++] = kCoreIn;
      slots[n++] = kShellOut;
      slots[n++] = kCoreOut;
      break;
    default: {
      // Single-medium event: couple the in/out pair on its own side.
      const bool shell = ev.in_medium == Medium::Shell;
      slots[n++] = shell ? kShellIn : kCoreIn;
      slots[n++] = shell ? kShellOut : kCoreOut;
      break;
    }
  }
  const int need = n == 4 ? 2 : 1;
  int have = 0;
  for (int k = 0; k < n; ++k)
    if (state.observed(ev.slot_edge[slots[k]])) ++have;
  if (have < need) return false;
  bool changed = false;
  for (int k = 0; k < n; ++k) {
    const int e = ev.slot_edge[slots[k]];
    if (e < 0 || state.labels[e] == EdgeLabel::Observed) continue;
    if (!labelable(tree.edges[e])) continue;
    state.labels[e] = EdgeLabel::Observed;
    changed = true;
  }
  return changed;
}

void propagate_observation(const RayTree& tree, ObservationState& state) {
  if (state.labels.size() != tree.edges.size())
    state.labels.resize(tree.edges.size(), EdgeLabel::Unknown);
  std::vector<char> queued(tree.events.size(), 1);
  std::vector<int> work(tree.events.size());
  std::iota(work.begin(), work.end(), 0);
  while (!work.empty()) {
    const int ei = work.back();
    work.pop_back();
    queued[ei] = 0;
    if (!apply_event_rule(tree, ei, state)) continue;
    // A freshly labelled edge can enable the rule at its other endpoint.
    for (int slot = 0; slot < 4; ++slot) {
      const int e = tree.events[ei].slot_edge[slot];
      if (e < 0) continue;
      for (const int nb : {tree.edges[e].from_event, tree.edges[e].to_event}) {
        if (nb < 0 || queued[nb]) continue;
        queued[nb] = 1;
        work.push_back(nb);
      }
    }
  }
}

bool root_observed(const RayTree& tree, const ObservationState& state) {
  const EventNode& root = tree.root_event();
  const int fwd = root.slot_edge[tree.root_slot];
  const int bwd = root.slot_edge[paired_slot(tree.root_slot)];
  return state.observed(fwd) || state.observed(bwd);
}

double observed_time_span(const RayTree& tree, const ObservationState& state) {
  double span = 0.0;
  for (std::size_t i = 0; i < tree.edges.size(); ++i) {
    if (state.labels[i] != EdgeLabel::Observed) continue;
    const HalfRay& e = tree.edges[i];
    span = std::max({span, std::abs(e.t0), std::abs(e.t1)});
  }
  return span;
}

GccReport check_gcc_simple(const BoundaryCurve& curve, const BoundaryArc& gamma,
                           double horizon, int n_s, int n_theta) {
  n_s = std::max(1, n_s);
  n_theta = std::max(2, n_theta);
  constexpr double kMargin = 1e-9;  // open arc: shave the endpoints
  GccReport rep;
  for (int i = 0; i < n_s; ++i) {
    const double s0 = static_cast<double>(i) / n_s;
    const bool start_inside = gamma.contains(s0, kMargin);
    for (int j = 1; j < n_theta; ++j) {
      const double theta = kPi * j / n_theta;
      ++rep.checked;
      if (start_inside) continue;  // meets the arc at time zero
      const CurveFrame f0 = curve.frame_at(s0);
      Dir2 d(std::cos(theta) * f0.tangent.vec() -
             std::sin(theta) * f0.normal.vec());
      Vec2 p = curve.point_at(s0);
      GccWitness wit;
      wit.s = s0;
      wit.theta = theta;
      wit.params = {s0};
      wit.points = {p};
      double t = 0.0;
      bool hit = false;
      while (true) {
        const auto h = curve.intersect_ray(p, d, 1e-9);
        if (!h) throw StuckRayError("billiard flight found no boundary ahead");
        if (t + h->distance > horizon) break;
        t += h->distance;
        wit.params.push_back(h->s);
        wit.points.push_back(h->point);
        if (!h->grazing && gamma.contains(h->s, kMargin)) {
          hit = true;
          break;
        }
        d = reflect(d, curve.frame_at(h->s).normal);
        p = h->point;
        if (!wit.periodic && param_distance(h->s, s0) < 1e-7) {
          const double back = germ_angle(curve.frame_at(h->s), Surface::Wall,
                                         Medium::Shell, d);
          if (std::abs(back - theta) < 1e-7) {
            wit.periodic = true;
            wit.period_length = t;
          }
        }
      }
      if (hit) {
        rep.max_time = std::max(rep.max_time, t);
      } else {
        rep.pass = false;
        rep.witness = std::move(wit);
        return rep;
      }
    }
  }
  rep.pass = true;
  return rep;
}

const char* sample_verdict_name(SampleVerdict v) {
  switch (v) {
    case SampleVerdict::Observed: return "observed";
    case SampleVerdict::Undetermined: return "undetermined";
    default: return "trapped-witness";
  }
}

int ObservabilityReport::exit_code() const {
  if (!witnesses.empty()) return 3;
  if (undetermined > 0) return 2;
  return 0;
}

namespace {

struct SampleSpec {
  Surface surface;
  Medium medium;
  double s;
  double theta;
};

/// Does a certified trapped orbit pass through this (still unobserved)
/// sample's grid cell, travelling either way along the cycle?
bool orbit_crosses(const Scenario& sc, const TrappedOrbit& orb,
                   const ObsSample& smp, double ds, double dtheta) {
  if (smp.surface == Surface::Interface && smp.medium == Medium::Core)
    return false;  // trapped cycles never enter the inclusion
  const std::size_t n = orb.params.size();
  for (std::size_t b = 0; b < n; ++b) {
    if (orb.surfaces[b] != smp.surface) continue;
    if (param_distance(orb.params[b], smp.s) > ds) continue;
    const CurveFrame f =
        surface_curve(sc, orb.surfaces[b]).frame_at(orb.params[b]);
    const double fwd = germ_angle(f, smp.surface, smp.medium, orb.directions[b]);
    const Dir2 rev = orb.directions[(b + n - 1) % n].reversed();
    const double bwd = germ_angle(f, smp.surface, smp.medium, rev);
    if (std::abs(fwd - smp.theta) <= dtheta ||
        std::abs(bwd - smp.theta) <= dtheta)
      return true;
  }
  return false;
}

}  // namespace

ObservabilityReport check_observability(const Scenario& sc,
                                        const BoundaryArc& gamma,
                                        double horizon, int n_s, int n_theta,
                                        int depth_cap,
                                        std::vector<TrappedOrbit> witnesses,
                                        bool serial) {
  n_s = std::max(1, n_s);
  n_theta = std::max(2, n_theta);
  std::vector<SampleSpec> specs;
  const auto add_surface = [&](Surface surf, Medium m) {
    for (int i = 0; i < n_s; ++i)
      for (int j = 1; j < n_theta; ++j)
        specs.push_back(
            {surf, m, static_cast<double>(i) / n_s, kPi * j / n_theta});
  };
  add_surface(Surface::Wall, Medium::Shell);
  if (sc.inner) {
    add_surface(Surface::Interface, Medium::Shell);
    add_surface(Surface::Interface, Medium::Core);
  }

  ObservabilityReport rep;
  rep.witnesses = std::move(witnesses);
  rep.samples.resize(specs.size());

  TraceOptions opts = TraceOptions::from(sc);
  opts.horizon = horizon;
  opts.depth_cap = depth_cap;
  opts.reverse = true;  // the fixpoint feeds on past as well as future germs
  opts.prune_arc = gamma;

  // Event trees around germs with long-lived core recursion are astronomically
  // large at any useful horizon, but the certificate (when one exists) sits in
  // the first few breadth-first generations. Grow each sample's tree under an
  // escalating soft event budget and stop as soon as the root is certified or
  // the tree completed without hitting the budget.
  const long ladder[] = {1500, 12000, 96000};
  parallel_for(specs.size(), serial, [&](std::size_t k) {
    const SampleSpec& q = specs[k];
    ObsSample out;
    out.surface = q.surface;
    out.medium = q.medium;
    out.s = q.s;
    out.theta = q.theta;
    try {
      const PhasePoint p0 = boundary_phase(sc, q.surface, q.s, q.theta, q.medium);
      for (const long budget : ladder) {
        TraceOptions level = opts;
        level.soft_budget = true;
        level.max_events = std::min(budget, opts.max_events);
        const RayTree tree = trace(sc, p0, level);
        ObservationState st = seed_observed(tree, gamma, sc.tol.geom);
        propagate_observation(tree, st);
        out.depth_used = 0;
        bool truncated = false;
        for (const HalfRay& e : tree.edges) {
          out.depth_used = std::max(out.depth_used, e.depth);
          truncated = truncated || e.leaf == LeafStatus::BudgetExpired;
        }
        if (root_observed(tree, st)) {
          out.verdict = SampleVerdict::Observed;
          out.time = observed_time_span(tree, st);
          break;
        }
        out.verdict = SampleVerdict::Undetermined;
        if (!truncated) {
          out.note.clear();  // the full tree fit: a genuine horizon/depth limit
          break;
        }
        out.note = "event budget truncated the search";
        if (level.max_events >= opts.max_events) break;
      }
    } catch (const Error& err) {
      out.verdict = SampleVerdict::Undetermined;
      out.note = err.what();
    }
    rep.samples[k] = std::move(out);
  });

  if (!rep.witnesses.empty()) {
    const double ds = 0.5 / n_s;
    const double dtheta = kPi / n_theta;
    for (ObsSample& smp : rep.samples) {
      if (smp.verdict == SampleVerdict::Observed) continue;
      for (const TrappedOrbit& orb : rep.witnesses) {
        if (orbit_crosses(sc, orb, smp, ds, dtheta)) {
          smp.verdict = SampleVerdict::TrappedWitness;
          break;
        }
      }
    }
  }

  for (const ObsSample& smp : rep.samples) {
    if (smp.verdict == SampleVerdict::Observed) {
      ++rep.observed;
      rep.max_time = std::max(rep.max_time, smp.time);
    } else {
      ++rep.undetermined;
    }
  }
  rep.all_observed = !rep.samples.empty() && rep.undetermined == 0 &&
                     rep.witnesses.empty();
  return rep;
}

}  // namespace raysplit
