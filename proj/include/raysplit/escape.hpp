#pragma once

#include <vector>

#include "raysplit/arc.hpp"
#include "raysplit/optics.hpp"
#include "raysplit/scenario.hpp"
#include "raysplit/vec2.hpp"

namespace raysplit {

/// Drift of a straight flight leaving the inclusion at parameter `s` in
/// direction `xi`: the cosine between `xi` and the counter-clockwise tangent
/// at the first boundary point the flight reaches (the outer wall, or the
/// inclusion itself for shallow directions). Positive values drift the
/// bounce sequence counter-clockwise, negative ones clockwise.
double escape_value(const Scenario& sc, double s, const Dir2& xi);

struct EscapeSample {
  double s = 0.0;      // inclusion parameter
  double value = 0.0;  // escape_value along the outward normal
};

struct MonotoneViolation {
  double s_before = 0.0;
  double s_after = 0.0;
  double drop = 0.0;  // how far the profile decreased between the two samples
};

/// Escape-drift profile over the unobserved part of the inclusion boundary.
struct EscapeProfile {
  std::vector<EscapeSample> samples;  // closed complement arc, ccw order
  std::vector<MonotoneViolation> violations;
  bool nondecreasing = false;      // overall verdict (with the mono collar)
  bool refinement_stable = false;  // verdict unchanged at half the spacing
  bool vacuous = false;            // the observed arc already covers everything
};

/// Scans s -> escape_value(s, outward normal) over the complement of the
/// observed inclusion arc and reports whether the profile is nondecreasing
/// in the traversal direction. `spacing` is the maximum parameter gap
/// between samples (<= 0 picks 1/1024).
EscapeProfile is_uniformly_escaping(const Scenario& sc, const BoundaryArc& gamma2,
                                    double spacing = 0.0);

enum class TrapMechanism {
  TirRetroreflection,  // the cycle bounces off the inclusion above critical
  PureWall,            // the cycle never touches the inclusion
};

/// A periodic reflection cycle that avoids both observed arcs forever.
struct TrappedOrbit {
  std::vector<Surface> surfaces;    // boundary of each bounce, cycle order
  std::vector<double> params;       // boundary parameter of each bounce
  std::vector<Vec2> points;         // bounce positions
  std::vector<Dir2> directions;     // outgoing direction at each bounce
  std::vector<double> thetas;       // incidence angle from the normal
  double period_length = 0.0;       // geometric length of one cycle
  double period_time = 0.0;         // travel time (all segments in the shell)
  double closure_error = 0.0;       // first-return residual after refinement
  TrapMechanism mechanism = TrapMechanism::PureWall;
};

/// Grid-seeded search for periodic shell cycles (pure reflection dynamics)
/// that never meet the observed wall arc, never meet the observed inclusion
/// arc, and bounce off the inclusion only above the critical angle (so no
/// transmitted branch can leak energy out). A symmetry pre-pass bisects for
/// retroreflected cycles (normal wall incidence) along the theta = pi/2 seed
/// line; the general pass marches every (wall parameter, launch angle) seed
/// and polishes near-returns with a damped Newton iteration on the wall
/// first-return map. Results are reduced to primitive cycles, deduplicated,
/// and ordered by discovery.
std::vector<TrappedOrbit> find_trapped_rays(const Scenario& sc,
                                            const BoundaryArc& gamma1,
                                            const BoundaryArc& gamma2,
                                            double horizon, int n_s, int n_theta);

struct TransmissionViolation {
  double wall_s = 0.0;    // sampled launch point on the unobserved wall
  double theta = 0.0;     // launch angle from the tangent
  double inner_s = 0.0;   // first inclusion hit parameter
  bool tir = false;       // no transmitted branch existed at all
  double exit_forward = 0.0;   // transmitted-chord landing, forward branch
  double exit_backward = 0.0;  // transmitted-chord landing, reversed branch
};

struct TransmissionReport {
  bool holds = false;  // every checked transmission lands in the observed arc
  long checked = 0;    // samples that passed the geometric preconditions
  std::vector<TransmissionViolation> violations;
};

/// For launches from the unobserved wall whose first flight hits the
/// unobserved part of the inclusion and whose reflection returns to the
/// unobserved wall, checks that both transmitted half-branches cross the
/// inclusion into the observed arc. Total internal reflection (no transmitted
/// branch) counts as a violation.
TransmissionReport check_transmission_capture(const Scenario& sc,
                                              const BoundaryArc& gamma1,
                                              const BoundaryArc& gamma2,
                                              int n_s, int n_theta);

}  // namespace raysplit
