#include "doctest.h"

#include <cmath>
#include <sstream>

#include "raysplit/errors.hpp"
#include "raysplit/tracer.hpp"

using namespace raysplit;

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kSqrt2 = std::sqrt(2.0);

Scenario concentric() {
  return parse_scenario(R"(
[outer]
kind = circle
center = (0, 0)
radius = 2
[inner]
kind = circle
center = (0, 0)
radius = 1
[speeds]
c1 = 1
c2 = sqrt(2)
)");
}

Scenario figure_scenario() {
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

Scenario bare_circle(double R) {
  std::ostringstream cfg;
  cfg << "[outer]\nkind = circle\ncenter = (0, 0)\nradius = " << R << "\n";
  return parse_scenario(cfg.str());
}

int count_kind(const RayTree& t, EventKind k) {
  int n = 0;
  for (const auto& ev : t.events) n += ev.kind == k ? 1 : 0;
  return n;
}
}  // namespace

TEST_CASE("shell collision map: radial retroreflection onto the inclusion") {
  Scenario sc = concentric();
  PhasePoint p = boundary_phase(sc, Surface::Wall, 0.0, kPi / 2, Medium::Shell);
  CHECK(p.position.x == doctest::Approx(2.0));
  CHECK(p.dir.x() == doctest::Approx(-1.0));
  Collision col = collision_shell(sc, p);
  CHECK(col.surface == Surface::Interface);
  CHECK(col.hit.point.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(col.hit.point.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(col.theta == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(col.reflected.dir.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(col.reflected.time == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shell collision map: steep chord misses the inclusion") {
  Scenario sc = concentric();
  // 80 degrees of incidence at the wall: the chord stays 2 sin 80 > 1 away
  // from the centre, so the next hit is the wall again at equal incidence.
  const double theta_t = kPi / 2 - 80.0 * kPi / 180.0;
  PhasePoint p = boundary_phase(sc, Surface::Wall, 0.0, theta_t, Medium::Shell);
  Collision col = collision_shell(sc, p);
  CHECK(col.surface == Surface::Wall);
  CHECK(col.theta == doctest::Approx(80.0 * kPi / 180.0).epsilon(1e-12));
}

TEST_CASE("shell collision map: exact retroreflecting chord of the 4x2 ellipse") {
  Scenario sc = figure_scenario();
  PhasePoint p;
  p.surface = Surface::Interface;
  p.s = sc.inner->nearest_param({1.0, 0.0});
  p.position = {1.0, 0.0};
  p.dir = Dir2(Vec2{1.0, 4.0 * kSqrt2});
  p.medium = Medium::Shell;
  Collision col = collision_shell(sc, p);
  CHECK(col.surface == Surface::Wall);
  CHECK(col.hit.point.x == doctest::Approx(4.0 / 3.0).epsilon(1e-11));
  CHECK(col.hit.point.y == doctest::Approx(4.0 * kSqrt2 / 3.0).epsilon(1e-11));
  CHECK(col.hit.distance == doctest::Approx(1.91485421551267622).epsilon(1e-12));
  // normal incidence: the ellipse normal at B points along AB
  CHECK(col.theta == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(col.reflected.dir.x() == doctest::Approx(-p.dir.x()).epsilon(1e-10));
  CHECK(col.reflected.dir.y() == doctest::Approx(-p.dir.y()).epsilon(1e-10));
}

TEST_CASE("core collision map: diameter and square orbit") {
  Scenario sc = concentric();
  PhasePoint p;
  p.surface = Surface::Interface;
  p.s = 0.0;
  p.position = {1.0, 0.0};
  p.dir = Dir2(Vec2{-1.0, 0.0});
  p.medium = Medium::Core;
  Collision col = collision_core(sc, p);
  CHECK(col.hit.point.x == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(col.reflected.dir.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(col.reflected.time == doctest::Approx(2.0 / kSqrt2).epsilon(1e-12));

  // 45-degree chords rotate the hit point by 90 degrees each bounce
  PhasePoint q = boundary_phase(sc, Surface::Interface, 0.0, kPi / 4, Medium::Core);
  Collision c1 = collision_core(sc, q);
  CHECK(c1.hit.point.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c1.hit.point.y == doctest::Approx(1.0).epsilon(1e-12));
  Collision c2 = collision_core(sc, c1.reflected);
  CHECK(c2.hit.point.x == doctest::Approx(-1.0).epsilon(1e-12));
  Collision c3 = collision_core(sc, c2.reflected);
  Collision c4 = collision_core(sc, c3.reflected);
  CHECK(c4.hit.point.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c4.hit.point.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trace: zero horizon gives the root event only") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 0.0;
  RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.0, kPi / 2, Medium::Shell), o);
  CHECK(t.events.size() == 1);
  for (const auto& e : t.edges) CHECK(e.leaf == LeafStatus::TimeExpired);
}

TEST_CASE("trace: concentric radial chain alternates boundaries with period 2") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 6.5;
  o.depth_cap = 0;  // obstacle dynamics: no transmitted branches
  RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.0, kPi / 2, Medium::Shell), o);
  // Follow the forward reflection chain from the root.
  int ev = 0;
  std::vector<double> times;
  std::vector<Surface> surfaces;
  for (;;) {
    const int edge_idx = t.events[ev].slot_edge[kShellOut];
    REQUIRE(edge_idx >= 0);
    const HalfRay& e = t.edges[edge_idx];
    if (e.to_event < 0) break;
    ev = e.to_event;
    times.push_back(t.events[ev].time);
    surfaces.push_back(t.events[ev].surface);
  }
  REQUIRE(times.size() == 6);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(times[i] == doctest::Approx(double(i + 1)).epsilon(1e-10));
    CHECK(surfaces[i] == (i % 2 == 0 ? Surface::Interface : Surface::Wall));
  }
  // transmissions were cut by the depth cap, not silently dropped
  bool saw_depth_leaf = false;
  for (const auto& e : t.edges) saw_depth_leaf |= e.leaf == LeafStatus::DepthExpired;
  CHECK(saw_depth_leaf);
}

TEST_CASE("trace: single-medium 45-degree orbit closes into a square") {
  Scenario sc = bare_circle(1.0);
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 4 * kSqrt2 + 0.1;
  RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.0, kPi / 4, Medium::Shell), o);
  REQUIRE(t.events.size() >= 5);
  const Vec2 back = t.events[4].point;
  CHECK(distance(back, t.events[0].point) < 1e-9);
  CHECK(t.events[4].time == doctest::Approx(4 * kSqrt2).epsilon(1e-10));
}

TEST_CASE("trace: interface roots carry the Snell pair") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 0.5;

  SUBCASE("shell side at 30 degrees transmits at 45") {
    PhasePoint p = boundary_phase(sc, Surface::Interface, 0.0, kPi / 2 - kPi / 6,
                                  Medium::Shell);
    RayTree t = trace(sc, p, o);
    const EventNode& root = t.root_event();
    CHECK(root.kind == EventKind::ReflectTransmit);
    CHECK(root.theta1 == doctest::Approx(kPi / 6).epsilon(1e-12));
    CHECK(root.theta2 == doctest::Approx(kPi / 4).epsilon(1e-12));
  }
  SUBCASE("core side at 89 degrees exits just under the critical angle") {
    PhasePoint p = boundary_phase(sc, Surface::Interface, 0.0,
                                  kPi / 2 - 89.0 * kPi / 180.0, Medium::Core);
    RayTree t = trace(sc, p, o);
    const EventNode& root = t.root_event();
    CHECK(root.kind == EventKind::ReflectTransmit);
    CHECK(root.theta2 == doctest::Approx(89.0 * kPi / 180.0).epsilon(1e-12));
    CHECK(root.theta1 ==
          doctest::Approx(std::asin(std::sin(89.0 * kPi / 180.0) / kSqrt2))
              .epsilon(1e-12));
    CHECK(root.theta1 < root.theta2);
  }
  SUBCASE("shell side beyond critical reflects totally") {
    PhasePoint p = boundary_phase(sc, Surface::Interface, 0.0, kPi / 2 - 1.3,
                                  Medium::Shell);  // incidence 1.3 rad > pi/4
    RayTree t = trace(sc, p, o);
    CHECK(t.root_event().kind == EventKind::TotalInternalReflection);
    CHECK(slot_count(t.root_event().kind) == 2);
  }
}

TEST_CASE("trace invariants: segment clocks, Snell at events, monotone times") {
  Scenario sc = figure_scenario();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 12.0;
  o.depth_cap = 3;
  o.reverse = true;
  RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.37, 1.1, Medium::Shell), o);
  REQUIRE(t.events.size() > 10);
  for (const HalfRay& e : t.edges) {
    if (e.leaf == LeafStatus::DepthExpired) continue;
    const double c = sc.speed(e.medium);
    CHECK(std::abs((e.t1 - e.t0) - e.length / c) < 1e-10);
    if (e.to_event >= 0) {
      const double tf = t.events[e.from_event].time;
      const double tt = t.events[e.to_event].time;
      CHECK(std::abs(std::abs(tt - tf) - e.length / c) < 1e-10);
      CHECK((e.backward ? tt < tf : tt > tf));
    }
  }
  int rt_events = 0;
  for (const EventNode& ev : t.events) {
    if (ev.kind != EventKind::ReflectTransmit) continue;
    ++rt_events;
    CHECK(std::sin(ev.theta1) / sc.c1 ==
          doctest::Approx(std::sin(ev.theta2) / sc.c2).epsilon(1e-12));
  }
  CHECK(rt_events > 0);
}

TEST_CASE("trace: reversing the terminal half-ray replays the path") {
  Scenario sc = bare_circle(1.0);
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 3.2;  // a few bounces of the 45-degree orbit
  RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.0, kPi / 4, Medium::Shell), o);
  REQUIRE(t.events.size() >= 3);
  const int last = static_cast<int>(t.events.size()) - 1;
  const EventNode& term = t.events[last];
  const int arrive_idx = term.slot_edge[term.arrival_slot];
  REQUIRE(arrive_idx >= 0);
  const Dir2 w = slot_direction(term, static_cast<SlotId>(term.arrival_slot));

  PhasePoint back;
  back.surface = term.surface;
  back.s = term.s;
  back.position = term.point;
  back.dir = w.reversed();
  back.medium = Medium::Shell;
  RayTree r = trace(sc, back, o);
  // positions replay in reverse order
  for (std::size_t k = 1; k < t.events.size(); ++k) {
    REQUIRE(r.events.size() > k);
    const Vec2 expect = t.events[t.events.size() - 1 - k].point;
    CHECK(distance(r.events[k].point, expect) < 1e-8);
  }
}

TEST_CASE("trace: reverse mode grows the past of the root") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 2.5;
  o.depth_cap = 1;
  o.reverse = true;
  RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.0, kPi / 2, Medium::Shell), o);
  bool found_past_interface = false;
  for (const EventNode& ev : t.events)
    if (ev.surface == Surface::Interface &&
        std::abs(ev.time + 1.0) < 1e-9 &&
        distance(ev.point, {1.0, 0.0}) < 1e-9)
      found_past_interface = true;
  CHECK(found_past_interface);
  double tmin = 0.0;
  for (const EventNode& ev : t.events) tmin = std::min(tmin, ev.time);
  CHECK(tmin < -1.9);
}

TEST_CASE("trace: tangential contact passes straight through") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 2 * std::sqrt(3.0) + 0.05;
  // Aim from (2,0) exactly tangent to the unit inclusion.
  PhasePoint p;
  p.surface = Surface::Wall;
  p.s = 0.0;
  p.position = {2.0, 0.0};
  p.dir = Dir2(Vec2{-std::cos(kPi / 6), std::sin(kPi / 6)});
  p.medium = Medium::Shell;
  RayTree t = trace(sc, p, o);
  REQUIRE(count_kind(t, EventKind::Diffractive) == 1);
  int di = -1;
  for (int i = 0; i < static_cast<int>(t.events.size()); ++i)
    if (t.events[i].kind == EventKind::Diffractive) di = i;
  const EventNode& dev = t.events[di];
  CHECK(distance(dev.point, {0.5, std::sqrt(3.0) / 2}) < 1e-6);
  CHECK(slot_count(dev.kind) == 2);
  // collinear continuation: the outgoing slot repeats the travel line
  const Dir2 out = slot_direction(dev, kShellOut);
  CHECK(out.x() == doctest::Approx(p.dir.x()).epsilon(1e-12));
  CHECK(out.y() == doctest::Approx(p.dir.y()).epsilon(1e-12));
  // and the ray carries on to the far wall point (-1, sqrt 3)
  bool far_wall = false;
  for (const EventNode& ev : t.events)
    if (ev.surface == Surface::Wall && distance(ev.point, {-1.0, std::sqrt(3.0)}) < 1e-6)
      far_wall = true;
  CHECK(far_wall);
}

TEST_CASE("trace: critical incidence glides and emits germs") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.depth_cap = 2;
  o.glide_spacing = 0.1;
  o.horizon = 0.5 / kSqrt2 + 0.01;  // room for five 0.1-arc steps, not six
  // Root on the interface leaving at exactly the critical angle.
  PhasePoint p = boundary_phase(sc, Surface::Interface, 0.0, kPi / 4, Medium::Shell);
  RayTree t = trace(sc, p, o);
  const EventNode& root = t.root_event();
  CHECK(root.kind == EventKind::CriticalGliding);
  CHECK(root.theta1 == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(slot_count(root.kind) == 4);
  // forward glide chain: five emission events spaced 0.1 of arc apart
  CHECK(count_kind(t, EventKind::CriticalGliding) == 1 + 5);
  int germs = 0;
  for (const HalfRay& e : t.edges) {
    if (e.is_glide) {
      CHECK(e.medium == Medium::Core);
      CHECK(std::abs((e.t1 - e.t0) - e.length / sc.c2) < 1e-12);
    }
    if (!e.is_glide && e.from_event > 0 &&
        t.events[e.from_event].kind == EventKind::CriticalGliding &&
        e.slot == kShellOut && !e.backward)
      ++germs;
  }
  CHECK(germs == 5);
}

TEST_CASE("trace: event budget throws") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 100.0;
  o.max_events = 16;
  CHECK_THROWS_AS(
      trace(sc, boundary_phase(sc, Surface::Wall, 0.1, 1.0, Medium::Shell), o),
      EventBudgetError);
}

TEST_CASE("trace: event CSV is deterministic and well formed") {
  Scenario sc = concentric();
  TraceOptions o = TraceOptions::from(sc);
  o.horizon = 5.0;
  o.depth_cap = 2;
  auto dump = [&]() {
    RayTree t = trace(sc, boundary_phase(sc, Surface::Wall, 0.2, 1.4, Medium::Shell), o);
    std::ostringstream s;
    write_event_csv(t, s);
    return s.str();
  };
  const std::string a = dump(), b = dump();
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == "time,boundary,s,kind,theta1,theta2,depth");
  CHECK(a.find("reflect_transmit") != std::string::npos);
}
