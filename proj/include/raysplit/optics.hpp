#pragma once

#include <optional>

#include "raysplit/vec2.hpp"

namespace raysplit {

/// What happens when a ray meets a boundary.
///
///  - WallReflection: specular bounce on the outer wall.
///  - ReflectTransmit: interface hit below the critical angle; the ray both
///    reflects and transmits, so the event carries four half-rays.
///  - CriticalGliding: interface hit at the critical angle (within the
///    angular collar); the transmitted branch degenerates into a trajectory
///    gliding along the interface.
///  - TotalInternalReflection: interface hit from the slow side above the
///    critical angle; no transmitted branch.
///  - Diffractive: tangential interface contact; the ray continues straight.
///  - WallGliding: trajectory creeping along the outer wall (only exists when
///    launched that way; interior dynamics never create one on a strictly
///    convex wall).
enum class EventKind {
  WallReflection,
  ReflectTransmit,
  CriticalGliding,
  TotalInternalReflection,
  Diffractive,
  WallGliding,
};

const char* event_kind_name(EventKind k);

/// Specular reflection of a unit direction about a surface with unit normal n
/// (either orientation of n gives the same result).
inline Dir2 reflect(const Dir2& d, const Dir2& n) {
  const double k = dot(d, n);
  return Dir2(d.vec() - 2.0 * k * n.vec());
}

/// Critical angle of incidence on the slow side (speed c_slow) of an
/// interface with fast side c_fast: sin(theta_c) = c_slow / c_fast.
/// Requires c_slow < c_fast.
double critical_angle(double c_slow, double c_fast);

/// Snell-Descartes transmission. `d` is the unit incoming direction, `n` the
/// unit interface normal pointing against the ray (towards the incoming
/// side), c_in/c_out the speeds of the incoming and outgoing media. The
/// transmitted angle satisfies sin(theta_out)/c_out = sin(theta_in)/c_in.
/// Returns nothing when the incidence is beyond the critical angle.
std::optional<Dir2> refract(const Dir2& d, const Dir2& n, double c_in, double c_out);

/// Which side of the interface a ray travels in.
enum class Medium { Shell, Core };  // between the curves / inside the inclusion

/// Which boundary a point sits on.
enum class Surface { Wall, Interface };

/// Classify a boundary hit. `theta` is the incidence angle from the normal in
/// [0, pi/2], `grazing` the geometric tangency flag from the intersector.
/// tol_angle is the collar half-width around the critical angle.
EventKind classify_hit(Surface surface, Medium incoming, double theta, bool grazing,
                       double c_shell, double c_core, double tol_angle);

}  // namespace raysplit
