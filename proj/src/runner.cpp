#include "raysplit/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "raysplit/ellipse_lab.hpp"
#include "raysplit/errors.hpp"
#include "raysplit/escape.hpp"
#include "raysplit/observe.hpp"
#include "raysplit/regions.hpp"
#include "raysplit/svg.hpp"
#include "raysplit/tracer.hpp"

namespace raysplit {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

const char* surface_name(Surface s) {
  return s == Surface::Wall ? "wall" : "interface";
}

const char* medium_name(Medium m) { return m == Medium::Shell ? "shell" : "core"; }

/// Accumulates the stable-format report: one `key: value` line per call.
class Report {
 public:
  void line(const std::string& key, const std::string& value) {
    text_ += key + ": " + value + "\n";
  }
  void line(const std::string& key, double value) { line(key, fmt_g(value)); }
  void line(const std::string& key, long value) {
    line(key, std::to_string(value));
  }
  void line(const std::string& key, int value) {
    line(key, std::to_string(value));
  }
  void arc_line(const std::string& key, const BoundaryArc& arc) {
    line(key, "lo=" + fmt_g(arc.lo) + " hi=" + fmt_g(arc.hi()) +
                  " span=" + fmt_g(arc.span));
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  return file;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file = open_out(path);
  file << text;
  if (!file) throw IoError("write failed: " + path.string());
}

/// Observed arc on the inclusion. A point observer gets the arc the
/// iterative construction certifies; a declared arc names the same parameter
/// range on the inclusion (the observed caps face the same way); a full
/// observation covers the inclusion too.
BoundaryArc resolve_inner_gamma(const Scenario& sc) {
  switch (sc.observation.mode) {
    case ObservationSpec::Mode::Full:
      return BoundaryArc::full_arc();
    case ObservationSpec::Mode::Point:
      return build_observed_arcs(sc, sc.observation.x0).inner_arc;
    case ObservationSpec::Mode::Arc:
    default: {
      const BoundaryArc wall = sc.observation_arc();
      return BoundaryArc::between(wall.lo, wall.hi());
    }
  }
}

// Styles shared by the figures.
SvgStyle curve_style() { return {"#1a1a1a", 1.5, "none", 1.0, false}; }
SvgStyle gamma_style() { return {"#2a9d2a", 4.0, "none", 1.0, false}; }
SvgStyle inner_gamma_style() { return {"#d62728", 4.0, "none", 1.0, false}; }
SvgStyle orbit_style() { return {"#b00020", 2.0, "none", 1.0, false}; }

void add_boundaries(SvgScene& svg, const Scenario& sc) {
  svg.add_curve(sc.outer, curve_style());
  if (sc.has_inner()) svg.add_curve(*sc.inner, curve_style());
}

long env_positive(const char* name, long fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v <= 0) {
    throw ScenarioError(std::string(name) + " must be a positive integer, got '" +
                        raw + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// trace

int run_trace(const Scenario& sc, const std::filesystem::path& out, Report& rep) {
  TraceOptions opts = TraceOptions::from(sc);
  opts.soft_budget = true;  // a huge cascade truncates instead of failing
  const PhasePoint germ =
      boundary_phase(sc, Surface::Wall, 0.0, kPi / 2.0, Medium::Shell);
  const RayTree tree = trace(sc, germ, opts);

  {
    std::ofstream csv = open_out(out / "events.csv");
    write_event_csv(tree, csv);
  }

  SvgScene svg;
  add_boundaries(svg, sc);
  for (const HalfRay& edge : tree.edges) {
    SvgStyle st;
    st.stroke = edge.medium == Medium::Shell ? "#1f77b4" : "#d62728";
    st.stroke_width = 1.0;
    if (edge.backward) {
      st.stroke = "#888888";
      st.dashed = true;
    }
    svg.add_segment(edge.p0, edge.p1, st);
  }
  svg.add_point(germ.position, 4.0, orbit_style());
  svg.write((out / "tree.svg").string());

  long leaves[6] = {0, 0, 0, 0, 0, 0};
  double max_time = 0.0;
  for (const HalfRay& edge : tree.edges) {
    leaves[static_cast<int>(edge.leaf)]++;
    max_time = std::max(max_time, std::abs(edge.t1));
    max_time = std::max(max_time, std::abs(edge.t0));
  }
  rep.line("events", static_cast<long>(tree.events.size()));
  rep.line("edges", static_cast<long>(tree.edges.size()));
  rep.line("leaves-hit-gamma", leaves[static_cast<int>(LeafStatus::HitGamma)]);
  rep.line("leaves-time", leaves[static_cast<int>(LeafStatus::TimeExpired)]);
  rep.line("leaves-depth", leaves[static_cast<int>(LeafStatus::DepthExpired)]);
  rep.line("leaves-gliding", leaves[static_cast<int>(LeafStatus::GlidingEnd)]);
  rep.line("leaves-budget", leaves[static_cast<int>(LeafStatus::BudgetExpired)]);
  rep.line("max-time", max_time);
  rep.line("verdict", "traced");
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// construct

int run_construct(const Scenario& sc, const std::filesystem::path& out,
                  Report& rep) {
  if (sc.observation.mode != ObservationSpec::Mode::Point) {
    throw ScenarioError("construct needs a point observer in the scenario");
  }

  ConstructionState st;
  try {
    st = build_observed_arcs(sc, sc.observation.x0);
  } catch (const IterationBudgetError& e) {
    rep.line("verdict", "iteration-budget");
    rep.line("error", e.what());
    return kExitUndetermined;
  }

  {
    std::ofstream csv = open_out(out / "construction.csv");
    csv << "n,wall_lo,wall_hi,wall_span,inner_lo,inner_hi,inner_span\n";
    for (const IterationRecord& it : st.history) {
      csv << it.n << ',' << fmt_g(it.wall_arc.lo) << ','
          << fmt_g(it.wall_arc.hi()) << ',' << fmt_g(it.wall_arc.span) << ','
          << fmt_g(it.inner_arc.lo) << ',' << fmt_g(it.inner_arc.hi()) << ','
          << fmt_g(it.inner_arc.span) << '\n';
    }
  }

  // Figure: both boundaries, then the wall/inclusion arc of every iteration
  // (fading in as the arcs grow toward the fixpoint).
  SvgScene svg;
  add_boundaries(svg, sc);
  const std::size_t n = st.history.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double fade = 0.3 + 0.7 * static_cast<double>(i + 1) / n;
    SvgStyle wall_st = gamma_style();
    wall_st.opacity = fade;
    SvgStyle inner_st = inner_gamma_style();
    inner_st.opacity = fade;
    svg.add_arc(sc.outer, st.history[i].wall_arc, wall_st);
    svg.add_arc(*sc.inner, st.history[i].inner_arc, inner_st);
  }
  svg.write((out / "construction.svg").string());

  rep.line("iterations", st.iterations);
  rep.line("stop", stop_reason_name(st.reason));
  rep.arc_line("base-arc", st.base_arc);
  rep.arc_line("wall-arc", st.wall_arc);
  rep.arc_line("inner-arc", st.inner_arc);

  try {
    const Vec2 w = witness_source(sc, st.inner_arc, &st.wall_arc);
    rep.line("witness-source", "(" + fmt_g(w.x) + ", " + fmt_g(w.y) + ")");
    rep.line("verdict", "fixpoint");
  } catch (const WitnessMismatchError& e) {
    rep.line("witness-mismatch", e.what());
    rep.line("verdict", "witness-mismatch");
    return kExitUndetermined;
  }
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// check-ueg

int run_check_ueg(const Scenario& sc, const std::filesystem::path& out,
                  Report& rep) {
  if (!sc.has_inner()) {
    throw ScenarioError("check-ueg needs a scenario with an inclusion");
  }
  const BoundaryArc gamma2 = resolve_inner_gamma(sc);
  const EscapeProfile prof = is_uniformly_escaping(sc, gamma2);

  {
    std::ofstream csv = open_out(out / "drift.csv");
    csv << "s,value\n";
    for (const EscapeSample& smp : prof.samples) {
      csv << fmt_g(smp.s) << ',' << fmt_g(smp.value) << '\n';
    }
  }

  rep.arc_line("inner-gamma", gamma2);
  rep.line("samples", static_cast<long>(prof.samples.size()));
  rep.line("vacuous", prof.vacuous ? "yes" : "no");
  rep.line("refinement-stable", prof.refinement_stable ? "yes" : "no");
  rep.line("violations", static_cast<long>(prof.violations.size()));
  if (!prof.violations.empty()) {
    const MonotoneViolation& v = prof.violations.front();
    rep.line("first-violation", "s_before=" + fmt_g(v.s_before) +
                                    " s_after=" + fmt_g(v.s_after) +
                                    " drop=" + fmt_g(v.drop));
  }
  rep.line("verdict", prof.nondecreasing ? "uniformly-escaping" : "not-escaping");
  return prof.nondecreasing ? kExitSuccess : kExitWitness;
}

// ---------------------------------------------------------------------------
// check-trap

void write_orbit_csv(const std::filesystem::path& path,
                     const std::vector<TrappedOrbit>& orbits) {
  std::ofstream csv = open_out(path);
  csv << "orbit,bounce,boundary,s,x,y,theta\n";
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    const TrappedOrbit& orb = orbits[k];
    for (std::size_t i = 0; i < orb.points.size(); ++i) {
      csv << k << ',' << i << ',' << surface_name(orb.surfaces[i]) << ','
          << fmt_g(orb.params[i]) << ',' << fmt_g(orb.points[i].x) << ','
          << fmt_g(orb.points[i].y) << ',' << fmt_g(orb.thetas[i]) << '\n';
    }
  }
}

void report_orbits(Report& rep, const std::vector<TrappedOrbit>& orbits) {
  rep.line("trapped-orbits", static_cast<long>(orbits.size()));
  const std::size_t shown = std::min<std::size_t>(orbits.size(), 4);
  for (std::size_t k = 0; k < shown; ++k) {
    const TrappedOrbit& orb = orbits[k];
    rep.line("orbit-" + std::to_string(k),
             std::string(orb.mechanism == TrapMechanism::TirRetroreflection
                             ? "tir-retroreflection"
                             : "pure-wall") +
                 " bounces=" + std::to_string(orb.points.size()) +
                 " period_time=" + fmt_g(orb.period_time) +
                 " period_length=" + fmt_g(orb.period_length) +
                 " closure=" + fmt_g(orb.closure_error));
  }
}

int run_check_trap(const Scenario& sc, const std::filesystem::path& out,
                   Report& rep) {
  if (!sc.has_inner()) {
    throw ScenarioError("check-trap needs a scenario with an inclusion");
  }
  const BoundaryArc gamma1 = resolve_wall_gamma(sc);
  const BoundaryArc gamma2 = resolve_inner_gamma(sc);
  // Missing a cycle only weakens the verdict, so the seed grid never drops
  // below the resolution the fixtures were validated at.
  const int n_s = std::max(sc.sampling.grid_s, 192);
  const int n_theta = std::max(sc.sampling.grid_theta, 64);
  const std::vector<TrappedOrbit> orbits =
      find_trapped_rays(sc, gamma1, gamma2, sc.caps.horizon, n_s, n_theta);

  rep.arc_line("wall-gamma", gamma1);
  rep.arc_line("inner-gamma", gamma2);
  rep.line("seed-grid", std::to_string(n_s) + "x" + std::to_string(n_theta));
  report_orbits(rep, orbits);

  if (orbits.empty()) {
    rep.line("verdict", "no-trapped-cycles");
    return kExitSuccess;
  }

  write_orbit_csv(out / "trapped.csv", orbits);
  SvgScene svg;
  add_boundaries(svg, sc);
  svg.add_arc(sc.outer, gamma1, gamma_style());
  svg.add_arc(*sc.inner, gamma2, inner_gamma_style());
  svg.add_loop(orbits.front().points, orbit_style());
  svg.write((out / "trapped.svg").string());

  rep.line("verdict", "trapped-witness");
  return kExitWitness;
}

// ---------------------------------------------------------------------------
// check-gcc

int run_check_gcc(const Scenario& sc, const std::filesystem::path& out,
                  Report& rep) {
  const BoundaryArc gamma = resolve_wall_gamma(sc);
  const GccReport gcc =
      check_gcc_simple(sc.outer, gamma, sc.caps.horizon,
                       sc.sampling.grid_s, sc.sampling.grid_theta);

  rep.arc_line("gamma", gamma);
  rep.line("grid", std::to_string(sc.sampling.grid_s) + "x" +
                       std::to_string(sc.sampling.grid_theta));
  rep.line("checked", gcc.checked);
  if (gcc.pass) {
    rep.line("max-time", gcc.max_time);
    rep.line("verdict", "controlled");
    return kExitSuccess;
  }

  const GccWitness& w = *gcc.witness;
  rep.line("witness-s", w.s);
  rep.line("witness-theta", w.theta);
  rep.line("witness-bounces", static_cast<long>(w.points.size()));
  rep.line("witness-periodic", w.periodic ? "yes" : "no");
  if (w.periodic) rep.line("witness-period-length", w.period_length);
  {
    std::ofstream csv = open_out(out / "witness.csv");
    csv << "bounce,s,x,y\n";
    for (std::size_t i = 0; i < w.points.size(); ++i) {
      csv << i << ',' << fmt_g(w.params[i]) << ',' << fmt_g(w.points[i].x)
          << ',' << fmt_g(w.points[i].y) << '\n';
    }
  }
  SvgScene svg;
  svg.add_curve(sc.outer, curve_style());
  svg.add_arc(sc.outer, gamma, gamma_style());
  if (w.periodic) {
    svg.add_loop(w.points, orbit_style());
  } else {
    svg.add_polyline(w.points, orbit_style());
  }
  svg.write((out / "witness.svg").string());

  rep.line("verdict", "escaping-orbit");
  return kExitWitness;
}

// ---------------------------------------------------------------------------
// check-obs

int run_check_obs(const Scenario& sc, const std::filesystem::path& out,
                  Report& rep) {
  const BoundaryArc gamma = resolve_wall_gamma(sc);

  std::vector<TrappedOrbit> witnesses;
  if (sc.has_inner()) {
    const BoundaryArc gamma2 = resolve_inner_gamma(sc);
    witnesses = find_trapped_rays(sc, gamma, gamma2, sc.caps.horizon,
                                  std::max(sc.sampling.grid_s, 192),
                                  std::max(sc.sampling.grid_theta, 64));
  }

  const ObservabilityReport obs = check_observability(
      sc, gamma, sc.caps.horizon, sc.sampling.grid_s, sc.sampling.grid_theta,
      sc.caps.depth_cap, witnesses);

  {
    std::ofstream csv = open_out(out / "samples.csv");
    csv << "boundary,medium,s,theta,verdict,time,depth,note\n";
    for (const ObsSample& smp : obs.samples) {
      csv << surface_name(smp.surface) << ',' << medium_name(smp.medium) << ','
          << fmt_g(smp.s) << ',' << fmt_g(smp.theta) << ','
          << sample_verdict_name(smp.verdict) << ',' << fmt_g(smp.time) << ','
          << smp.depth_used << ',' << smp.note << '\n';
    }
  }

  SvgScene svg;
  add_boundaries(svg, sc);
  svg.add_arc(sc.outer, gamma, gamma_style());
  if (!obs.witnesses.empty()) {
    svg.add_loop(obs.witnesses.front().points, orbit_style());
  }
  svg.write((out / "observability.svg").string());

  rep.arc_line("gamma", gamma);
  rep.line("grid", std::to_string(sc.sampling.grid_s) + "x" +
                       std::to_string(sc.sampling.grid_theta));
  rep.line("horizon", sc.caps.horizon);
  rep.line("depth-cap", sc.caps.depth_cap);
  rep.line("samples", static_cast<long>(obs.samples.size()));
  rep.line("observed", obs.observed);
  rep.line("undetermined", obs.undetermined);
  report_orbits(rep, obs.witnesses);
  rep.line("max-time", obs.max_time);
  if (obs.all_observed) {
    rep.line("summary", "all " + std::to_string(obs.samples.size()) +
                            " samples observed, max time " + fmt_g(obs.max_time));
    rep.line("verdict", "all-observed");
  } else if (!obs.witnesses.empty()) {
    rep.line("verdict", "trapped-witness");
  } else {
    rep.line("verdict", "undetermined");
  }
  return obs.exit_code();
}

// ---------------------------------------------------------------------------
// ellipse

int run_ellipse(const Scenario& sc, const std::filesystem::path& out,
                Report& rep) {
  if (sc.has_inner()) {
    throw ScenarioError("the ellipse lab needs a bare table without an inclusion");
  }
  const EllipseFrame frame = EllipseFrame::of(sc.outer);
  rep.line("semi-major", frame.a);
  rep.line("semi-minor", frame.b);
  rep.line("focal-distance", frame.c);

  // Caustic tour: a spread of launches, each chord of each orbit classified;
  // the class must stay constant along the orbit.
  const int n_orbits = 8;
  const int n_bounces = 48;
  long violations = 0;
  std::vector<std::pair<double, double>> launches;
  for (int k = 0; k < n_orbits; ++k) {
    launches.emplace_back(static_cast<double>(k) / n_orbits + 0.0371,
                          0.35 + 0.3 * (k % 3));
  }
  {
    std::ofstream csv = open_out(out / "caustics.csv");
    csv << "orbit,s0,theta0,class,bounces,violations\n";
    for (int k = 0; k < n_orbits; ++k) {
      const auto [s0, th0] = launches[k];
      const std::vector<Vec2> pts = billiard_orbit(sc.outer, s0, th0, n_bounces);
      const CausticClass cls = classify_caustic(sc.outer, pts[0], pts[1]);
      long bad = 0;
      for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (classify_caustic(sc.outer, pts[i], pts[i + 1]) != cls) ++bad;
      }
      violations += bad;
      csv << k << ',' << fmt_g(s0) << ',' << fmt_g(th0) << ','
          << caustic_class_name(cls) << ',' << pts.size() << ',' << bad << '\n';
    }
  }
  rep.line("caustic-orbits", static_cast<long>(n_orbits));
  rep.line("caustic-violations", violations);

  SvgScene svg;
  svg.add_curve(sc.outer, curve_style());

  const bool is_circle = frame.c <= 1e-12 * frame.a;
  if (is_circle) {
    rep.line("table", "circle");
    rep.line("note", "focal and arc demos need distinct foci; skipped");
  } else {
    rep.line("table", "ellipse");
    svg.add_point(frame.f1, 4.0, orbit_style());
    svg.add_point(frame.f2, 4.0, orbit_style());

    // Focal dynamics from the top vertex: chords through alternating foci
    // flattening onto the major axis.
    const double s_top = sc.outer.nearest_param(frame.to_world(Vec2{0.0, frame.b}));
    const FocalTrace focal = focal_convergence(sc.outer, s_top, 200);
    {
      std::ofstream csv = open_out(out / "focal.csv");
      csv << "bounce,x,y,chord_axis_angle\n";
      // One chord angle per flight, so the final point has no angle column.
      for (std::size_t i = 0; i < focal.points.size(); ++i) {
        csv << i << ',' << fmt_g(focal.points[i].x) << ','
            << fmt_g(focal.points[i].y) << ',';
        if (i < focal.axis_angles.size()) csv << fmt_g(focal.axis_angles[i]);
        csv << '\n';
      }
    }
    rep.line("focal-converged", focal.converged ? "yes" : "no");
    rep.line("focal-bounces-to-converge", focal.bounces_to_converge);
    svg.add_polyline(
        std::vector<Vec2>(focal.points.begin(),
                          focal.points.begin() +
                              std::min<std::size_t>(focal.points.size(), 12)),
        {"#1f77b4", 1.0, "none", 0.9, false});

    // A lower-right arc cut out by a third-quadrant focal chord: short, not
    // of visibility form, yet the sampled control condition passes on it.
    const double t1 = 220.0 * kPi / 180.0;
    const double s1 = sc.outer.param_from_angle(t1);
    const BoundaryArc arc = lemel_arc(sc.outer, s1);
    svg.add_arc(sc.outer, arc, gamma_style());
    rep.arc_line("demo-arc", arc);
    const double horizon = 5.0 * sc.outer.perimeter();
    const GccReport gcc = check_gcc_simple(sc.outer, arc, horizon, 90, 45);
    rep.line("demo-arc-controlled", gcc.pass ? "yes" : "no");
    if (gcc.pass) rep.line("demo-arc-max-time", gcc.max_time);
    rep.line("demo-arc-visibility-form",
             is_gamma_x0_form(sc.outer, arc) ? "some" : "none");

    const BothSidesReport both = both_sides_gcc(sc.outer, arc, horizon, 90, 45);
    rep.line("demo-complement-controlled",
             both.complement && both.complement->pass ? "yes" : "no");

    // Any arc longer than half the perimeter is the visible region of the
    // point where its endpoint tangents cross.
    const std::optional<Vec2> x0 = is_gamma_x0_form(sc.outer, arc.complement());
    if (x0) {
      rep.line("complement-visibility-source",
               "(" + fmt_g(x0->x) + ", " + fmt_g(x0->y) + ")");
      svg.add_point(*x0, 4.0, {"#2a9d2a", 1.5, "none", 1.0, false});
    } else {
      rep.line("complement-visibility-source", "none");
    }
  }

  svg.write((out / "ellipse.svg").string());
  rep.line("verdict", "lab-complete");
  return kExitSuccess;
}

}  // namespace

void apply_env_overrides(Scenario& sc) {
  sc.caps.depth_cap =
      static_cast<int>(env_positive("RAYSPLIT_DEPTH", sc.caps.depth_cap));
  sc.caps.max_events = env_positive("RAYSPLIT_MAX_EVENTS", sc.caps.max_events);
  sc.caps.max_iter =
      static_cast<int>(env_positive("RAYSPLIT_MAX_ITER", sc.caps.max_iter));
}

BoundaryArc resolve_wall_gamma(const Scenario& sc) {
  switch (sc.observation.mode) {
    case ObservationSpec::Mode::Full:
      return BoundaryArc::full_arc();
    case ObservationSpec::Mode::Point:
      return shadow_arc(sc.outer, sc.observation.x0);
    case ObservationSpec::Mode::Arc:
    default:
      return sc.observation_arc();
  }
}

int run_subcommand(const std::string& name, Scenario sc, const RunConfig& cfg) {
  apply_env_overrides(sc);
  if (cfg.grid_s > 0) sc.sampling.grid_s = cfg.grid_s;
  if (cfg.grid_theta > 0) sc.sampling.grid_theta = cfg.grid_theta;
  if (cfg.depth > 0) sc.caps.depth_cap = cfg.depth;
  if (cfg.horizon >= 0.0) sc.caps.horizon = cfg.horizon;
  if (cfg.seed > 0) sc.sampling.seed = cfg.seed;

  const std::filesystem::path out(cfg.out_dir.empty() ? "." : cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory: " + out.string());

  Report rep;
  rep.line("command", name);
  rep.line("scenario", cfg.scenario_label);

  int code = kExitUsage;
  if (name == "trace") {
    code = run_trace(sc, out, rep);
  } else if (name == "construct") {
    code = run_construct(sc, out, rep);
  } else if (name == "check-ueg") {
    code = run_check_ueg(sc, out, rep);
  } else if (name == "check-trap") {
    code = run_check_trap(sc, out, rep);
  } else if (name == "check-gcc") {
    code = run_check_gcc(sc, out, rep);
  } else if (name == "check-obs") {
    code = run_check_obs(sc, out, rep);
  } else if (name == "ellipse") {
    code = run_ellipse(sc, out, rep);
  } else {
    throw ScenarioError("unknown subcommand: " + name);
  }

  rep.line("exit", code);
  write_text(out / "report.txt", rep.text());
  if (!cfg.quiet) std::cout << rep.text();
  return code;
}

}  // namespace raysplit
