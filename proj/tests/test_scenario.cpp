#include "doctest.h"

#include <cmath>

#include "raysplit/errors.hpp"
#include "raysplit/scenario.hpp"

using namespace raysplit;

namespace {
constexpr double kPi = 3.14159265358979323846;

const char* kConcentric = R"(
# two concentric circles, slow shell / fast core
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
)";

const char* kFigureArc = R"(
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

[observation]
mode = arc
units = angle
lo = pi/2
hi = 3*pi/2
)";
}  // namespace

TEST_CASE("expression evaluator") {
  CHECK(eval_expression("sqrt(2)") == std::sqrt(2.0));
  CHECK(eval_expression("90*deg") == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(eval_expression("2^10") == 1024.0);
  CHECK(eval_expression("-3 + 4*2") == 5.0);
  CHECK(eval_expression("2^2^3") == 256.0);  // right associative
  CHECK(eval_expression("atan2(1, 1)") == doctest::Approx(kPi / 4));
  CHECK(eval_expression("(1 + 2)*(3 - 5)") == -6.0);
  Expr r = Expr::parse("1 + 0.2*cos(3*t)");
  CHECK(r.uses_variable());
  CHECK(r(0.0) == doctest::Approx(1.2));
  CHECK(r(kPi / 3) == doctest::Approx(0.8));
  CHECK_THROWS_AS(eval_expression("1 + t"), ScenarioError);  // not constant
  CHECK_THROWS_AS(eval_expression("2 +"), ScenarioError);
  CHECK_THROWS_AS(eval_expression("foo(2)"), ScenarioError);
  CHECK_THROWS_AS(eval_expression("(1"), ScenarioError);
}

TEST_CASE("parse the concentric scenario") {
  Scenario s = parse_scenario(kConcentric);
  CHECK(s.outer_spec.kind == CurveKind::Circle);
  CHECK(s.outer_spec.radius == 2.0);
  REQUIRE(s.inner_spec.has_value());
  CHECK(s.inner_spec->radius == 1.0);
  CHECK(s.c2 == std::sqrt(2.0));
  CHECK(s.has_inner());
  CHECK(s.critical() == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(s.observation.mode == ObservationSpec::Mode::Full);
  CHECK(s.observation_arc().full());
  // defaults
  CHECK(s.caps.depth_cap == 8);
  CHECK(s.caps.max_events == 100000);
  CHECK(s.tol.geom == 1e-10);
  CHECK(s.glide_spacing_on(s.outer) ==
        doctest::Approx(s.outer.perimeter() / 256.0));
}

TEST_CASE("angle-unit observation arcs land on the left half") {
  Scenario s = parse_scenario(kFigureArc);
  const BoundaryArc g = s.observation_arc();
  CHECK(g.lo == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g.hi() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(g.contains(0.5));    // (-4, 0)
  CHECK(!g.contains(0.0));   // (4, 0)
  CHECK(!g.contains(0.25));  // open at the endpoints
}

TEST_CASE("print/parse round trip") {
  Scenario a = parse_scenario(kFigureArc);
  Scenario b = parse_scenario(print_scenario(a));
  CHECK(a == b);

  Scenario c = parse_scenario(kConcentric);
  CHECK(c == parse_scenario(print_scenario(c)));

  // radial inner curve and point observation
  Scenario d = parse_scenario(R"(
[outer]
kind = circle
center = (0, 0)
radius = 3

[inner]
kind = radial
center = (0.5, 0.1)
r = 0.8 + 0.02*cos(2*t)
samples = 2048

[observation]
mode = point
x0 = (6, 0)

[speeds]
c1 = 1
c2 = 2

[sampling]
grid_s = 64
grid_theta = 32
seed = 42
)");
  CHECK(d == parse_scenario(print_scenario(d)));
  CHECK(d.inner_spec->radius_expr == "0.8 + 0.02*cos(2*t)");
}

TEST_CASE("no inner section means a single-medium scenario") {
  Scenario s = parse_scenario(R"(
[outer]
kind = ellipse
center = (0, 0)
a = 2
b = 1
)");
  CHECK(!s.has_inner());
  CHECK(s == parse_scenario(print_scenario(s)));
}

TEST_CASE("validation failures") {
  SUBCASE("inner sticking out of the outer curve") {
    CHECK_THROWS_AS(parse_scenario(R"(
[outer]
kind = circle
center = (0, 0)
radius = 2

[inner]
kind = circle
center = (1.5, 0)
radius = 1
)"),
                    ScenarioError);
  }
  SUBCASE("touching curves have zero clearance") {
    CHECK_THROWS_AS(parse_scenario(R"(
[outer]
kind = circle
center = (0, 0)
radius = 2

[inner]
kind = circle
center = (1, 0)
radius = 1
)"),
                    ScenarioError);
  }
  SUBCASE("slow inclusion is rejected unless opted in") {
    const char* base = R"(
[outer]
kind = circle
center = (0, 0)
radius = 2

[inner]
kind = circle
center = (0, 0)
radius = 1

[speeds]
c1 = 2
c2 = 1
)";
    CHECK_THROWS_AS(parse_scenario(base), ScenarioError);
    std::string opt_in = std::string(base) + "allow_slow_inclusion = true\n";
    CHECK_NOTHROW(parse_scenario(opt_in));
  }
  SUBCASE("observation point inside the domain") {
    CHECK_THROWS_AS(parse_scenario(R"(
[outer]
kind = circle
center = (0, 0)
radius = 2

[observation]
mode = point
x0 = (1, 0)
)"),
                    ScenarioError);
  }
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_scenario("[outer]\nkind = circle\nbogus_key = 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line_no == 3);
  }
  CHECK_THROWS_AS(parse_scenario("kind = circle\n"), ParseError);   // no section
  CHECK_THROWS_AS(parse_scenario("[outer\n"), ParseError);          // bad header
  CHECK_THROWS_AS(parse_scenario("[outer]\nkind circle\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[wat]\nx = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(""), ParseError);  // missing outer
}

TEST_CASE("comments and whitespace are tolerated") {
  Scenario s = parse_scenario(
      "  [outer]  # outer curve\n"
      "kind = circle ; trailing note\n"
      "center = (0, 0)\n"
      "radius = 1.5   # metres\n");
  CHECK(s.outer_spec.radius == 1.5);
}
