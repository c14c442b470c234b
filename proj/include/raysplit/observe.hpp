#pragma once

#include <optional>
#include <string>
#include <vector>

#include "raysplit/arc.hpp"
#include "raysplit/escape.hpp"
#include "raysplit/geometry.hpp"
#include "raysplit/scenario.hpp"
#include "raysplit/tracer.hpp"

namespace raysplit {

/// Label carried by each half-ray edge of a ray tree. Labels only ever move
/// Unknown -> Observed, so every propagation pass is monotone and the
/// fixpoint below is unique regardless of rule order.
enum class EdgeLabel { Unknown, Observed };

/// Per-edge labels, parallel to RayTree::edges.
struct ObservationState {
  std::vector<EdgeLabel> labels;

  bool observed(int edge) const {
    return edge >= 0 && edge < static_cast<int>(labels.size()) &&
           labels[edge] == EdgeLabel::Observed;
  }
  int observed_count() const;
};

/// Initial labels from direct boundary evidence: an edge is Observed when
///  - tracing already absorbed it on the observation arc (HitGamma leaf), or
///  - its far endpoint is a plain wall reflection strictly inside `gamma`
///    (strictness shaved by `endpoint_margin`, so hits within the margin of
///    an arc endpoint stay Unknown — the arc is treated as open).
/// Tangential (diffractive) contacts never seed: a grazing touch carries no
/// boundary flux. Edges truncated by the horizon or the depth cap carry no
/// endpoint and stay Unknown. The wall point a root germ starts on is *not*
/// evidence; only genuine hits of the traced tree are.
ObservationState seed_observed(const RayTree& tree, const BoundaryArc& gamma,
                               double endpoint_margin = 1e-9);

/// Apply the local coupling rule of one event once; returns true when any
/// label changed. The rules, per event kind:
///  - wall reflection: the incoming and outgoing rays observe together;
///  - total internal reflection / tangential pass: the two rays on the
///    event's own side of the interface observe together;
///  - transmission and critical-incidence events: once any two of the four
///    germs are Observed, all four are.
/// Edges truncated by depth/time (or a truncated gliding chain) are never
/// labelled and never count as evidence. Unexplored slots are skipped.
bool apply_event_rule(const RayTree& tree, int event_index,
                      ObservationState& state);

/// Least fixpoint of the event rules over the whole tree (single-threaded
/// worklist; trees are small, parallelism lives at the sample level).
/// Idempotent, and confluent: any order of rule applications ends here.
void propagate_observation(const RayTree& tree, ObservationState& state);

/// Verdict for the root phase point: Observed iff either of its two root
/// half-rays (the forward germ in root_slot, or its past — the same-medium
/// incoming slot) is Observed after the fixpoint.
bool root_observed(const RayTree& tree, const ObservationState& state);

/// Largest |t| over Observed edges: the time window the certificate used.
/// Zero when nothing is observed.
double observed_time_span(const RayTree& tree, const ObservationState& state);

/// One sampled single-medium billiard orbit that avoids the arc.
struct GccWitness {
  double s = 0.0;      // launch parameter
  double theta = 0.0;  // launch angle from the ccw tangent, in (0, pi)
  std::vector<double> params;  // bounce parameters, starting point first
  std::vector<Vec2> points;    // matching boundary points
  bool periodic = false;       // returned to the launch state within horizon
  double period_length = 0.0;  // orbit length of the detected period
};

struct GccReport {
  bool pass = false;
  double max_time = 0.0;  // latest first-hit time among passing samples
  long checked = 0;       // samples examined (scan stops at the witness)
  std::optional<GccWitness> witness;
};

/// Geometric control condition for a single-medium billiard in `curve`:
/// every sampled orbit must meet `gamma` non-tangentially within `horizon`
/// (unit speed). Samples are s = i/n_s in normalised arc length and
/// theta = pi*j/n_theta, j = 1..n_theta-1, measured from the ccw tangent
/// (exact grazing excluded by construction). A launch point already strictly
/// inside the arc counts as a hit at time zero. Fails with the first orbit
/// that stays clear of the arc, flagged periodic when it revisits its launch
/// state.
GccReport check_gcc_simple(const BoundaryCurve& curve, const BoundaryArc& gamma,
                           double horizon, int n_s, int n_theta);

enum class SampleVerdict {
  Observed,        // root certified by the fixpoint
  Undetermined,    // not certified at this horizon/depth (not a disproof)
  TrappedWitness,  // sample coincides with a certified trapped orbit
};

const char* sample_verdict_name(SampleVerdict v);

/// One sampled phase point and what the fixpoint concluded about it.
struct ObsSample {
  Surface surface = Surface::Wall;
  Medium medium = Medium::Shell;
  double s = 0.0;
  double theta = 0.0;
  SampleVerdict verdict = SampleVerdict::Undetermined;
  double time = 0.0;    // certificate time window (Observed samples)
  int depth_used = 0;   // deepest medium switch the trace explored
  std::string note;     // per-sample error text, empty otherwise
};

struct ObservabilityReport {
  std::vector<ObsSample> samples;
  std::vector<TrappedOrbit> witnesses;  // certified trapped orbits, if any
  long observed = 0;
  long undetermined = 0;  // includes TrappedWitness samples
  double max_time = 0.0;  // largest certificate window among Observed samples
  bool all_observed = false;

  /// 0 = every sample Observed, 3 = a trapped-orbit certificate exists,
  /// 2 = undetermined samples remain (no certificate either way).
  int exit_code() const;
};

/// Sampled observability verdict for a two-medium scenario: for every grid
/// phase point (wall germs in the shell; interface germs in both media when
/// an inclusion exists) grow the event tree forward and backward, seed from
/// `gamma`, run the fixpoint, and record the root verdict. Grid convention
/// matches check_gcc_simple. Trees are grown under an escalating soft event
/// budget (capped by the scenario's max_events): certificates concentrate in
/// the first breadth-first generations, so truncating the fringe keeps the
/// scan fast without weakening Observed verdicts; samples that stay
/// uncertified only because the budget cut the search say so in their note.
/// Other per-sample failures (grazing wall) also surface as Undetermined
/// with a note. Pass certified trapped orbits in `witnesses` to mark grid
/// cells they cross and force exit code 3. `serial` runs the sample loop in
/// index order (for determinism checks); both modes produce identical
/// output.
ObservabilityReport check_observability(const Scenario& sc,
                                        const BoundaryArc& gamma,
                                        double horizon, int n_s, int n_theta,
                                        int depth_cap,
                                        std::vector<TrappedOrbit> witnesses = {},
                                        bool serial = false);

}  // namespace raysplit
