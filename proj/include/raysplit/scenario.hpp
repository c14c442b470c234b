#pragma once

#include <memory>
#include <optional>
#include <string>

#include "raysplit/arc.hpp"
#include "raysplit/geometry.hpp"
#include "raysplit/optics.hpp"
#include "raysplit/vec2.hpp"

namespace raysplit {

/// Tiny arithmetic-expression evaluator so config files can say `sqrt(2)` or
/// `1 + 0.2*cos(3*t)` instead of truncated decimals. Grammar: + - * / ^,
/// parentheses, unary minus, constants pi/e/deg, one free variable `t`, and
/// the functions sqrt sin cos tan asin acos atan exp log abs.
class Expr {
 public:
  struct Node;  // parse-tree node; opaque to users

  Expr() = default;
  static Expr parse(const std::string& src);
  double operator()(double t = 0.0) const;
  const std::string& source() const { return src_; }
  bool uses_variable() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string src_;
};

/// Evaluate a constant expression (no free variable allowed).
double eval_expression(const std::string& src);

/// Declarative curve description as written in a config file. Kept alongside
/// the built BoundaryCurve so scenarios can be printed back verbatim.
struct CurveSpec {
  CurveKind kind = CurveKind::Circle;
  Vec2 center{0.0, 0.0};
  double radius = 1.0;                      // circle
  double a = 1.0, b = 1.0, axis_angle = 0.0;  // ellipse
  std::string radius_expr;                  // radial r(t)
  int samples = 4096;                       // radial table resolution

  BoundaryCurve build() const;
  friend bool operator==(const CurveSpec&, const CurveSpec&) = default;
};

/// Where observation happens on the outer boundary.
struct ObservationSpec {
  enum class Mode { Full, Point, Arc };
  enum class Units { Angle, Param };  // how lo/hi are written in the file
  Mode mode = Mode::Full;
  Vec2 x0{0.0, 0.0};        // Point mode: exterior point defining the lit region
  double lo = 0.0, hi = 0.0;  // Arc mode endpoints (ccw from lo to hi)
  Units units = Units::Angle;

  friend bool operator==(const ObservationSpec&, const ObservationSpec&) = default;
};

struct Caps {
  double horizon = 100.0;   // seconds of flight per trace
  int depth_cap = 8;        // medium switches per branch
  long max_events = 100000;  // total events per trace
  int max_iter = 64;        // construction fixpoint budget
  friend bool operator==(const Caps&, const Caps&) = default;
};

struct Tolerances {
  double geom = 1e-10;     // point/segment coincidence
  double tangency = 1e-9;  // grazing-contact detection
  double angle = 1e-9;     // critical-angle collar
  double arc = 1e-10;      // construction fixpoint / arc comparison
  double witness = 1e-6;   // witness round-trip Hausdorff bound
  double mono = 1e-9;      // monotonicity slack in the escape scan
  double orbit = 1e-10;    // periodic-orbit Newton target
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct Sampling {
  int grid_s = 128;        // boundary-parameter samples
  int grid_theta = 64;     // direction samples
  unsigned long seed = 1;  // rng seed for randomized scans
  double glide_spacing = 0.0;  // gliding emission spacing; 0 = perimeter/256
  friend bool operator==(const Sampling&, const Sampling&) = default;
};

/// A full problem instance: the two curves, the two speeds, where we observe,
/// and every knob the algorithms read.
struct Scenario {
  CurveSpec outer_spec;
  std::optional<CurveSpec> inner_spec;
  double c1 = 1.0;
  double c2 = 1.4142135623730951;
  bool allow_slow_inclusion = false;
  ObservationSpec observation;
  Caps caps;
  Tolerances tol;
  Sampling sampling;

  // Built geometry (derived from the specs by finalize()).
  BoundaryCurve outer = BoundaryCurve::circle({0.0, 0.0}, 1.0);
  std::optional<BoundaryCurve> inner;

  /// Build curves from the specs and check every invariant. Throws
  /// ScenarioError naming the violated invariant.
  void finalize();

  bool has_inner() const { return inner.has_value(); }
  double speed(Medium m) const { return m == Medium::Shell ? c1 : c2; }
  /// arcsin(c1/c2); only meaningful when c2 > c1.
  double critical() const;
  /// The observation arc on the outer boundary (param space). Full mode gives
  /// the full arc; Point mode gives the region lit from x0 (computed by the
  /// caller via the regions module, so this throws for Point mode).
  BoundaryArc observation_arc() const;
  double glide_spacing_on(const BoundaryCurve& curve) const;

  friend bool operator==(const Scenario& p, const Scenario& q) {
    return p.outer_spec == q.outer_spec && p.inner_spec == q.inner_spec &&
           p.c1 == q.c1 && p.c2 == q.c2 &&
           p.allow_slow_inclusion == q.allow_slow_inclusion &&
           p.observation == q.observation && p.caps == q.caps && p.tol == q.tol &&
           p.sampling == q.sampling;
  }
};

/// Parse config text (sections [outer] [inner] [speeds] [observation] [caps]
/// [tolerances] [sampling]; `key = value` lines; # or ; comments; numeric
/// values may be expressions). Returns a finalized scenario.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical config text; parse_scenario(print_scenario(s)) == s.
std::string print_scenario(const Scenario& s);

}  // namespace raysplit
