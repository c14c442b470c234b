#include "doctest.h"

#include <cmath>
#include <random>

#include "raysplit/optics.hpp"

using namespace raysplit;

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kSqrt2 = std::sqrt(2.0);

// Ray heading "down" onto a horizontal interface with incidence angle th.
Dir2 down_ray(double th) { return Dir2(Vec2{std::sin(th), -std::cos(th)}); }
const Dir2 kUp(Vec2{0.0, 1.0});

double incidence(const Dir2& d, const Dir2& n) {
  return std::acos(std::min(1.0, std::abs(dot(d, n))));
}
}  // namespace

TEST_CASE("Snell transmission: 30 degrees at speeds (1, sqrt 2) exits at 45") {
  auto out = refract(down_ray(kPi / 6), kUp, 1.0, kSqrt2);
  REQUIRE(out.has_value());
  CHECK(incidence(*out, kUp) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(out->y() < 0.0);  // keeps going down
  CHECK(out->x() > 0.0);  // same tangential side
}

TEST_CASE("total internal reflection at 60 degrees for speeds (1, sqrt 2)") {
  CHECK(!refract(down_ray(kPi / 3), kUp, 1.0, kSqrt2).has_value());
}

TEST_CASE("critical angle of (1, sqrt 2) is pi/4") {
  CHECK(critical_angle(1.0, kSqrt2) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK_THROWS(critical_angle(2.0, 1.0));
}

TEST_CASE("normal incidence passes straight through") {
  auto out = refract(down_ray(0.0), kUp, 1.0, kSqrt2);
  REQUIRE(out.has_value());
  CHECK(out->x() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out->y() == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("Snell invariant sin(theta)/c is conserved") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(0.0, kPi / 2 - 1e-3);
  std::uniform_real_distribution<double> speed(0.2, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double th = angle(rng);
    const double c_in = speed(rng), c_out = speed(rng);
    auto out = refract(down_ray(th), kUp, c_in, c_out);
    const double s_in = std::sin(th) / c_in;
    if (std::sin(th) * c_out / c_in > 1.0) {
      CHECK(!out.has_value());
      continue;
    }
    REQUIRE(out.has_value());
    const double s_out = std::sin(incidence(*out, kUp)) / c_out;
    CHECK(s_out == doctest::Approx(s_in).epsilon(1e-12));
  }
}

TEST_CASE("transmission is reversible") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> angle(0.0, kPi / 2 - 1e-3);
  std::uniform_real_distribution<double> tilt(0.0, 2 * kPi);
  for (int i = 0; i < 500; ++i) {
    const double th = angle(rng);
    const double rot = tilt(rng);
    const Dir2 n = Dir2::from_angle(rot);             // arbitrary interface tilt
    const Dir2 d = Dir2::from_angle(rot + kPi - th);  // arrives against n
    auto fwd = refract(d, n, 1.0, kSqrt2);
    if (!fwd) continue;
    auto back = refract(fwd->reversed(), n, kSqrt2, 1.0);
    REQUIRE(back.has_value());
    CHECK(back->x() == doctest::Approx(-d.x()).epsilon(1e-10));
    CHECK(back->y() == doctest::Approx(-d.y()).epsilon(1e-10));
  }
}

TEST_CASE("specular reflection") {
  const Dir2 d(Vec2{1.0, -1.0});
  const Dir2 r = reflect(d, kUp);
  CHECK(r.x() == doctest::Approx(d.x()).epsilon(1e-15));
  CHECK(r.y() == doctest::Approx(-d.y()).epsilon(1e-15));
  // involution and normal-orientation independence
  const Dir2 rr = reflect(r, Dir2(Vec2{0.0, -1.0}));
  CHECK(rr.x() == doctest::Approx(d.x()).epsilon(1e-15));
  CHECK(rr.y() == doctest::Approx(d.y()).epsilon(1e-15));
}

TEST_CASE("event classification at the interface") {
  const double thc = critical_angle(1.0, kSqrt2);  // pi/4
  const double tol = 1e-9;
  auto kind = [&](Medium m, double th, bool grazing = false) {
    return classify_hit(Surface::Interface, m, th, grazing, 1.0, kSqrt2, tol);
  };
  CHECK(kind(Medium::Shell, kPi / 6) == EventKind::ReflectTransmit);
  CHECK(kind(Medium::Shell, thc) == EventKind::CriticalGliding);
  CHECK(kind(Medium::Shell, thc - 0.5 * tol) == EventKind::CriticalGliding);
  CHECK(kind(Medium::Shell, thc + 0.5 * tol) == EventKind::CriticalGliding);
  CHECK(kind(Medium::Shell, kPi / 3) == EventKind::TotalInternalReflection);
  CHECK(kind(Medium::Core, kPi / 3) == EventKind::ReflectTransmit);
  CHECK(kind(Medium::Core, 0.01) == EventKind::ReflectTransmit);
  CHECK(kind(Medium::Shell, 0.2, true) == EventKind::Diffractive);
  CHECK(classify_hit(Surface::Wall, Medium::Shell, 0.3, false, 1.0, kSqrt2, tol) ==
        EventKind::WallReflection);
}

TEST_CASE("event kind names are stable") {
  CHECK(std::string(event_kind_name(EventKind::ReflectTransmit)) ==
        "reflect_transmit");
  CHECK(std::string(event_kind_name(EventKind::CriticalGliding)) ==
        "critical_gliding");
}
