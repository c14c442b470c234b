#include "raysplit/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace raysplit {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::WallReflection: return "wall_reflection";
    case EventKind::ReflectTransmit: return "reflect_transmit";
    case EventKind::CriticalGliding: return "critical_gliding";
    case EventKind::TotalInternalReflection: return "total_internal_reflection";
    case EventKind::Diffractive: return "diffractive";
    case EventKind::WallGliding: return "wall_gliding";
  }
  return "?";
}

double critical_angle(double c_slow, double c_fast) {
  if (!(c_slow > 0.0) || !(c_fast > c_slow))
    throw std::invalid_argument("critical_angle: need 0 < c_slow < c_fast");
  return std::asin(c_slow / c_fast);
}

std::optional<Dir2> refract(const Dir2& d, const Dir2& n, double c_in, double c_out) {
  // Split d into normal and tangential parts relative to n. n points against
  // the ray, so dot(d, n) <= 0 for a genuine arrival.
  const double dn = dot(d, n);
  const Vec2 tang = d.vec() - dn * n.vec();
  const double sin_in = tang.norm();
  const double sin_out = sin_in * (c_out / c_in);
  if (sin_out > 1.0) return std::nullopt;  // beyond critical: no transmission
  const double cos_out = std::sqrt(std::max(0.0, 1.0 - sin_out * sin_out));
  Vec2 t_hat = sin_in > 0.0 ? tang / sin_in : Vec2{0.0, 0.0};
  // Continue into the far side: normal component keeps the sign of travel.
  const double sign = dn <= 0.0 ? -1.0 : 1.0;
  return Dir2(sign * cos_out * n.vec() + sin_out * t_hat);
}

EventKind classify_hit(Surface surface, Medium incoming, double theta, bool grazing,
                       double c_shell, double c_core, double tol_angle) {
  if (surface == Surface::Wall) return EventKind::WallReflection;
  if (grazing) return EventKind::Diffractive;
  const double c_in = incoming == Medium::Shell ? c_shell : c_core;
  const double c_out = incoming == Medium::Shell ? c_core : c_shell;
  // Heading into the slower (or equal) side: the transmitted branch always
  // exists. Under the standard hypothesis c_core > c_shell this covers every
  // core-side arrival.
  if (c_out <= c_in) return EventKind::ReflectTransmit;
  const double theta_c = critical_angle(c_in, c_out);
  if (theta < theta_c - tol_angle) return EventKind::ReflectTransmit;
  // The critical collar glides along the fast side. Gliding is only modelled
  // on the core side of the interface; with a slow inclusion (exploration
  // flag) the measure-zero collar is folded into the reflecting branch.
  if (theta <= theta_c + tol_angle)
    return incoming == Medium::Shell ? EventKind::CriticalGliding
                                     : EventKind::TotalInternalReflection;
  return EventKind::TotalInternalReflection;
}

}  // namespace raysplit
