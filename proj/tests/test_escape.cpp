#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "raysplit/escape.hpp"
#include "raysplit/regions.hpp"
#include "raysplit/tracer.hpp"

using namespace raysplit;

namespace {
constexpr double kPi = 3.14159265358979323846;

Scenario concentric(const char* c2 = "sqrt(2)") {
  std::string cfg =
      "[outer]\nkind = circle\ncenter = (0, 0)\nradius = 2\n"
      "[inner]\nkind = circle\ncenter = (0, 0)\nradius = 1\n"
      "[speeds]\nc1 = 1\nc2 = ";
  cfg += c2;
  cfg += "\n";
  return parse_scenario(cfg);
}

// Elliptical chamber with a centred circular inclusion; hosts the
// retroreflected bowtie cycle used throughout these tests.
Scenario elliptic_chamber() {
  return parse_scenario(R"(
[outer]
kind = ellipse
center = (0, 0)
a = 4
b = 2
[inner]
kind = circle
center = (0, 0)
radius = 1
[speeds]
c1 = 1
c2 = sqrt(2)
)");
}

Scenario offset_disk() {
  return parse_scenario(R"(
[outer]
kind = circle
center = (0, 0)
radius = 3
[inner]
kind = circle
center = (1.2, 0)
radius = 0.6
[speeds]
c1 = 1
c2 = sqrt(2)
)");
}

struct MapState {
  double s = 0.0;
  double theta = 0.0;
};

double outgoing_angle(const Scenario& sc, double s, const Dir2& d) {
  const CurveFrame f = sc.outer.frame_at(s);
  return std::atan2(-dot(d, f.normal), dot(d, f.tangent));
}

// Wall first-return map of the hard-mirror shell dynamics (independent
// re-implementation used to probe orbits found by the search).
MapState wall_map(const Scenario& sc, MapState w) {
  PhasePoint p = boundary_phase(sc, Surface::Wall, w.s, w.theta, Medium::Shell);
  for (int hop = 0; hop < 8; ++hop) {
    const Collision c = collision_shell(sc, p);
    if (c.surface == Surface::Wall)
      return {c.hit.s, outgoing_angle(sc, c.hit.s, c.reflected.dir)};
    p = c.reflected;
  }
  FAIL("flight failed to return to the wall");
  return w;
}

double state_distance(const MapState& a, const MapState& b) {
  return std::hypot(param_distance(a.s, b.s), a.theta - b.theta);
}
}  // namespace

TEST_CASE("radial escape drift vanishes between concentric circles") {
  const Scenario sc = concentric();
  for (const double s : {0.0, 0.13, 0.5, 0.77}) {
    const double v = escape_value(sc, s, sc.inner->frame_at(s).normal);
    CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("escape drift closed forms in the elliptical chamber") {
  const Scenario sc = elliptic_chamber();
  const double peak = 3.0 / std::sqrt(34.0);

  // Normal flight from the inclusion at polar angle -45 degrees lands on the
  // ellipse at (4/sqrt5, -4/sqrt5), where the ccw tangent is (4,1)/sqrt17.
  const auto drift = [&](double s) {
    return escape_value(sc, s, sc.inner->frame_at(s).normal);
  };
  CHECK(drift(0.875) == doctest::Approx(peak).epsilon(1e-10));
  CHECK(drift(0.125) == doctest::Approx(-peak).epsilon(1e-10));
  CHECK(std::abs(drift(0.0)) < 1e-12);
  CHECK(std::abs(drift(0.25)) < 1e-12);

  // Mirror symmetry about the x-axis makes the drift antisymmetric in s.
  const Scenario disk = offset_disk();
  for (const double s : {0.1, 0.31, 0.42}) {
    const double up = escape_value(disk, s, disk.inner->frame_at(s).normal);
    const double down =
        escape_value(disk, 1.0 - s, disk.inner->frame_at(1.0 - s).normal);
    CHECK(up + down == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("uniform escape holds on the concentric annulus") {
  const Scenario sc = concentric();
  const double phi0 = std::acos(2.0 / 3.0);
  const BoundaryArc g2 =
      BoundaryArc::between(phi0 / (2 * kPi), 1.0 - phi0 / (2 * kPi));
  const BoundaryArc comp = g2.complement();

  const EscapeProfile prof = is_uniformly_escaping(sc, g2, comp.span / 1000.0);
  CHECK_FALSE(prof.vacuous);
  REQUIRE(prof.samples.size() >= 1001);
  CHECK(param_distance(prof.samples.front().s, comp.lo) < 1e-12);
  CHECK(param_distance(prof.samples.back().s, comp.hi()) < 1e-12);
  for (const EscapeSample& smp : prof.samples) CHECK(std::abs(smp.value) < 1e-9);
  CHECK(prof.nondecreasing);
  CHECK(prof.violations.empty());
  CHECK(prof.refinement_stable);
}

TEST_CASE("drift profile rejects the half-shadowed elliptical chamber") {
  const Scenario sc = elliptic_chamber();
  const BoundaryArc g2 = BoundaryArc::between(0.25, 0.75);
  const EscapeProfile prof = is_uniformly_escaping(sc, g2);

  CHECK_FALSE(prof.vacuous);
  CHECK_FALSE(prof.nondecreasing);
  REQUIRE_FALSE(prof.violations.empty());
  CHECK(prof.refinement_stable);

  // With tan(t) = 2 tan(psi) tying the ellipse parameter to the inclusion
  // angle, the drift along the outward normal is
  //   -3 sin(t) cos(t) / sqrt((4 cos^2 t + sin^2 t)(4 sin^2 t + cos^2 t)),
  // maximised at t = -pi/4: peak value 3/5 at psi = -atan(1/2). Over the
  // unshadowed right half (traversed ccw from the bottom) the profile rises
  // from 0 to that peak and then falls, so the first decrease marks it.
  const auto peak_it = std::max_element(
      prof.samples.begin(), prof.samples.end(),
      [](const EscapeSample& a, const EscapeSample& b) { return a.value < b.value; });
  REQUIRE(peak_it != prof.samples.end());
  CHECK(peak_it->value == doctest::Approx(0.6).epsilon(1e-4));
  const double peak_s = 1.0 - std::atan(0.5) / (2 * kPi);
  CHECK(param_distance(peak_it->s, peak_s) < 1.0 / 1024.0);
  CHECK(param_distance(prof.violations.front().s_before, peak_it->s) < 1e-12);

  // The closed-form sample at psi = -45 degrees sits on the rising flank.
  const auto at_0875 = std::find_if(
      prof.samples.begin(), prof.samples.end(),
      [](const EscapeSample& smp) { return param_distance(smp.s, 0.875) < 1e-12; });
  REQUIRE(at_0875 != prof.samples.end());
  CHECK(at_0875->value == doctest::Approx(3.0 / std::sqrt(34.0)).epsilon(1e-10));
}

TEST_CASE("escape scan is vacuous when everything is observed") {
  const EscapeProfile prof =
      is_uniformly_escaping(concentric(), BoundaryArc::full_arc());
  CHECK(prof.vacuous);
  CHECK(prof.nondecreasing);
  CHECK(prof.refinement_stable);
  CHECK(prof.samples.empty());
}

TEST_CASE("retroreflected bowtie cycle hides from the left half-boundaries") {
  const Scenario sc = elliptic_chamber();
  const BoundaryArc left = BoundaryArc::between(0.25, 0.75);
  const auto orbits = find_trapped_rays(sc, left, left, 40.0, 192, 64);
  REQUIRE_FALSE(orbits.empty());

  const Vec2 A{1.0, 0.0};
  const Vec2 B{4.0 / 3.0, 4.0 * std::sqrt(2.0) / 3.0};
  const Vec2 C{4.0 / 3.0, -4.0 * std::sqrt(2.0) / 3.0};
  const auto bowtie = std::find_if(
      orbits.begin(), orbits.end(), [&](const TrappedOrbit& o) {
        return o.points.size() == 4 &&
               std::any_of(o.points.begin(), o.points.end(),
                           [&](const Vec2& p) { return distance(p, A) < 1e-6; });
      });
  REQUIRE(bowtie != orbits.end());

  // Canonical order starts at the wall bounce of smallest parameter (B).
  CHECK(distance(bowtie->points[0], B) < 1e-6);
  CHECK(distance(bowtie->points[1], A) < 1e-6);
  CHECK(distance(bowtie->points[2], C) < 1e-6);
  CHECK(distance(bowtie->points[3], A) < 1e-6);
  REQUIRE(bowtie->surfaces.size() == 4);
  CHECK(bowtie->surfaces[0] == Surface::Wall);
  CHECK(bowtie->surfaces[1] == Surface::Interface);
  CHECK(bowtie->surfaces[2] == Surface::Wall);
  CHECK(bowtie->surfaces[3] == Surface::Interface);

  CHECK(bowtie->period_length ==
        doctest::Approx(44.0 / std::sqrt(33.0)).epsilon(1e-10));
  CHECK(bowtie->period_time ==
        doctest::Approx(44.0 / std::sqrt(33.0)).epsilon(1e-10));
  CHECK(bowtie->closure_error < 1e-9);
  CHECK(bowtie->mechanism == TrapMechanism::TirRetroreflection);

  // The inclusion bounces graze at acos(1/sqrt(33)) from the normal (past the
  // 45-degree critical angle), the wall bounces are perfectly retroreflective.
  const double cos_inc = 1.0 / std::sqrt(33.0);
  for (const size_t i : {size_t{1}, size_t{3}}) {
    const Dir2 n = sc.inner->frame_at(bowtie->params[i]).normal;
    CHECK(std::abs(std::abs(dot(bowtie->directions[i], n)) - cos_inc) < 1e-10);
    CHECK(bowtie->thetas[i] == doctest::Approx(std::acos(cos_inc)).epsilon(1e-9));
  }
  for (const size_t i : {size_t{0}, size_t{2}}) {
    const Dir2 t = sc.outer.frame_at(bowtie->params[i]).tangent;
    CHECK(std::abs(dot(bowtie->directions[i], t)) < 1e-8);
    CHECK(bowtie->thetas[i] < 1e-8);
  }

  // Shadowing probe: the polished state stays periodic for several cycles
  // before the ~130x-per-period defocusing amplifies the residual.
  const MapState start{bowtie->params[0],
                       outgoing_angle(sc, bowtie->params[0], bowtie->directions[0])};
  MapState cur = start;
  for (int period = 1; period <= 3; ++period) {
    cur = wall_map(sc, cur);
    cur = wall_map(sc, cur);
    CHECK(state_distance(cur, start) < 1e-6);
  }
}

TEST_CASE("no trapped cycles behind the constructed concentric arcs") {
  const Scenario sc = concentric();
  const ConstructionState st = build_observed_arcs(sc, Vec2{3.0, 0.0});
  const auto orbits =
      find_trapped_rays(sc, st.wall_arc, st.inner_arc, 40.0, 128, 64);
  CHECK(orbits.empty());
}

TEST_CASE("pure wall squares survive beside tiny observation windows") {
  const Scenario sc = concentric("100");
  const BoundaryArc g1 = BoundaryArc::between(0.05, 0.10);
  const BoundaryArc g2 = BoundaryArc::between(0.40, 0.45);
  const auto orbits = find_trapped_rays(sc, g1, g2, 40.0, 64, 64);
  REQUIRE_FALSE(orbits.empty());

  const auto square = std::find_if(
      orbits.begin(), orbits.end(), [](const TrappedOrbit& o) {
        return o.mechanism == TrapMechanism::PureWall && o.points.size() == 4;
      });
  REQUIRE(square != orbits.end());
  CHECK(square->period_length ==
        doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-9));
  for (size_t i = 0; i < 4; ++i) {
    CHECK(square->surfaces[i] == Surface::Wall);
    CHECK(square->points[i].norm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(square->thetas[i] == doctest::Approx(kPi / 4).epsilon(1e-9));
    CHECK(wrap_param(square->params[(i + 1) % 4] - square->params[i]) ==
          doctest::Approx(0.25).epsilon(1e-9));
    CHECK_FALSE(g1.contains(square->params[i]));
  }
}

TEST_CASE("transmission capture holds for a soft-contrast inclusion") {
  const Scenario sc = concentric("1.05");
  const BoundaryArc g = BoundaryArc::between(1.0 / 36.0, 35.0 / 36.0);
  const TransmissionReport rep = check_transmission_capture(sc, g, g, 64, 32);
  CHECK(rep.holds);
  CHECK(rep.checked > 0);
  CHECK(rep.violations.empty());
}

TEST_CASE("transmission capture fails across the half-shadowed chamber") {
  const Scenario sc = elliptic_chamber();
  const BoundaryArc left = BoundaryArc::between(0.25, 0.75);
  const TransmissionReport rep = check_transmission_capture(sc, left, left, 64, 32);
  CHECK_FALSE(rep.holds);
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                    [](const TransmissionViolation& v) { return v.tir; }));
  for (const TransmissionViolation& v : rep.violations) {
    CHECK_FALSE(left.contains(v.wall_s));
    CHECK_FALSE(left.contains(v.inner_s));
  }
}
