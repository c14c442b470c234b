#pragma once

#include <array>
#include <optional>
#include <vector>

#include "raysplit/arc.hpp"
#include "raysplit/geometry.hpp"
#include "raysplit/scenario.hpp"
#include "raysplit/vec2.hpp"

namespace raysplit {

/// The open arc of a convex boundary that faces away from an exterior point:
/// the points whose outward normal has a positive component along the
/// direction from `source` to the point. Its endpoints are the two tangency
/// points seen from `source`, and it is always longer than half the
/// perimeter. Throws InsidePointError when `source` is not outside.
BoundaryArc shadow_arc(const BoundaryCurve& curve, const Vec2& source);

/// Reach of the inclusion past the wall normal at parameter `s`, measured
/// along the signed tangent: the largest cosine between sign * tangent and a
/// direction from the wall point to the inclusion boundary, together with
/// the inclusion parameter realising it (a tangency point, or the entry
/// point when the tangent ray pierces the inclusion and the value is 1).
struct InclusionCosine {
  double value = 0.0;
  double inner_param = 0.0;
};
InclusionCosine inclusion_cosine(const Scenario& sc, double s, double sign);

/// Per-endpoint degeneracy marks for the stage-1 widening: the widening
/// trigger fired but no usable grazing root existed (the inward normal
/// already meets the inclusion at the endpoint, or no root within half a
/// perimeter), so the endpoint was kept and the scenario flagged.
struct ArcGrowthFlags {
  bool lo_degenerate = false;
  bool hi_degenerate = false;
};

/// Stage 1: widen the wall shadow arc of `source` past each endpoint, up to
/// the first parameter where the inward-normal sightline grazes the
/// inclusion. An endpoint stays put when the inclusion lies entirely behind
/// its normal line (nothing can block the normal rays on that side).
BoundaryArc initial_wall_arc(const Scenario& sc, const Vec2& source,
                             ArcGrowthFlags* flags = nullptr);

/// Stage 2: the inclusion arc spanned between the extremal-tangency points
/// seen from the wall arc's endpoints, taken on the side that faces the
/// wall arc. Throws ConstructionError if the span degenerates.
BoundaryArc initial_inner_arc(const Scenario& sc, const BoundaryArc& wall_arc);

/// Stage 3: push each inclusion endpoint toward the second crossing of the
/// line through the opposite wall endpoint, keeping only parameters whose
/// outward-normal ray lands inside `wall_arc`. Monotone (never shrinks).
/// `any_line_hit` reports whether either side's line met the inclusion again.
BoundaryArc grow_inner_arc(const Scenario& sc, const BoundaryArc& wall_arc,
                           const BoundaryArc& inner_arc,
                           bool* any_line_hit = nullptr);

/// Stage 4: push each wall endpoint outward to the farthest parameter whose
/// inward-normal ray strikes the inclusion exactly at the matching endpoint
/// of `inner_arc`. Endpoints with no such parameter stay put. Monotone.
BoundaryArc grow_outer_arc(const Scenario& sc, const BoundaryArc& wall_arc,
                           const BoundaryArc& inner_arc);

enum class StopReason {
  NormalParallel,      // the inward normal at a final wall endpoint retro-reflects
  NoLineIntersection,  // no further growth: lines miss or normal rays land outside
  Budget,              // iteration budget exhausted (reported by catchers)
};
const char* stop_reason_name(StopReason r);

struct IterationRecord {
  int n = 0;
  BoundaryArc wall_arc;
  BoundaryArc inner_arc;
};

/// Boundary of the unobserved pocket: the two complement arcs plus the two
/// straight bridges joining matching wall / inclusion endpoints.
struct ResidualRegion {
  BoundaryArc wall_unobserved;
  BoundaryArc inner_unobserved;
  std::array<std::array<Vec2, 2>, 2> bridges{};  // [side][0]=wall, [1]=inclusion
};
ResidualRegion residual_region(const Scenario& sc, const BoundaryArc& wall_arc,
                               const BoundaryArc& inner_arc);

struct ConstructionState {
  Vec2 source;
  BoundaryArc base_arc;    // wall shadow arc of the source, before widening
  BoundaryArc wall_arc;    // final wall arc
  BoundaryArc inner_arc;   // final inclusion arc
  std::vector<IterationRecord> history;  // entry 0 = initial arcs
  int iterations = 0;
  StopReason reason = StopReason::NoLineIntersection;
  ArcGrowthFlags start_flags;
  ResidualRegion residual;
};

/// Run stages 1-2 then alternate stages 3-4 until the inclusion arc stops
/// changing (within tol.arc). Throws IterationBudgetError past max_iter
/// (max_iter <= 0 uses the scenario cap), so a non-contracting sequence is
/// flagged instead of looping.
ConstructionState build_observed_arcs(const Scenario& sc, const Vec2& source,
                                      int max_iter = 0);

/// Exterior point whose shadow arc on the inclusion equals `inner_arc`:
/// intersection of the endpoint tangent lines, falling back to the stage-3
/// line through the opposite wall endpoint when the tangents degenerate
/// (wall_arc supplies those endpoints when available). The result is
/// verified by recomputing the shadow arc; WitnessMismatchError carries the
/// parameter-space Hausdorff gap when verification fails.
Vec2 witness_source(const Scenario& sc, const BoundaryArc& inner_arc,
                    const BoundaryArc* wall_arc = nullptr);

}  // namespace raysplit
