#pragma once

#include <string>

#include "raysplit/arc.hpp"
#include "raysplit/scenario.hpp"

namespace raysplit {

/// Exit codes shared by the library runner and the command-line wrapper.
inline constexpr int kExitSuccess = 0;       // pass / all samples observed
inline constexpr int kExitUsage = 1;         // bad arguments or scenario
inline constexpr int kExitUndetermined = 2;  // no certificate either way
inline constexpr int kExitWitness = 3;       // a counterexample was certified

/// Per-invocation options layered on top of the scenario file. Grid, depth,
/// horizon and seed override the scenario's own sampling and caps when set
/// (grid/depth: > 0, horizon: >= 0, seed: > 0).
struct RunConfig {
  std::string out_dir;  // artifact directory, created if missing
  std::string scenario_label = "scenario";
  int grid_s = 0;
  int grid_theta = 0;
  int depth = 0;
  double horizon = -1.0;
  unsigned long seed = 0;
  bool quiet = false;  // suppress the report echo on stdout
};

/// Apply the environment cap overrides to a scenario: RAYSPLIT_DEPTH,
/// RAYSPLIT_MAX_EVENTS and RAYSPLIT_MAX_ITER replace the matching caps when
/// set. Throws ScenarioError for values that do not parse as positive
/// integers.
void apply_env_overrides(Scenario& sc);

/// The observation arc on the outer wall implied by the scenario's
/// observation block: the declared arc, the full boundary, or (for a point
/// observer) the wall region visible from that point.
BoundaryArc resolve_wall_gamma(const Scenario& sc);

/// Run one subcommand against a scenario and write its artifacts (report.txt
/// plus the subcommand's CSV logs and SVG figures) into cfg.out_dir. The
/// report is echoed to stdout unless cfg.quiet. Returns the exit code:
/// 0 on success (or every sample observed), 2 when the verdict stayed
/// undetermined, 3 when a counterexample witness was certified.
///
/// Subcommands: trace, construct, check-ueg, check-trap, check-gcc,
/// check-obs, ellipse. Throws ScenarioError for an unknown subcommand or a
/// scenario the subcommand cannot use (construct needs a point observer,
/// check-ueg and check-trap need an inclusion, ellipse needs a bare conic
/// table), and IoError when an artifact cannot be written.
int run_subcommand(const std::string& name, Scenario sc, const RunConfig& cfg);

}  // namespace raysplit
