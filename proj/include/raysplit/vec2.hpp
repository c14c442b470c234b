#pragma once

#include <cmath>

namespace raysplit {

/// Plane vector with the handful of operations the engine needs.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double xx, double yy) : x(xx), y(yy) {}

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator/(double k) const { return {x / k, y / k}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
};

constexpr inline Vec2 operator*(double k, const Vec2& v) { return {v.x * k, v.y * k}; }

constexpr inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product; positive when b is counter-clockwise of a.
constexpr inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Rotate by +90 degrees (counter-clockwise).
constexpr inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Unit-length direction. Normalised on construction; the invariant is
/// maintained by never exposing mutable components.
class Dir2 {
 public:
  Dir2() : v_(1.0, 0.0) {}
  explicit Dir2(const Vec2& v) : v_(v / v.norm()) {}
  Dir2(double x, double y) : Dir2(Vec2{x, y}) {}

  static Dir2 from_angle(double a) { return Dir2(unchecked(), {std::cos(a), std::sin(a)}); }

  double x() const { return v_.x; }
  double y() const { return v_.y; }
  const Vec2& vec() const { return v_; }
  double angle() const { return std::atan2(v_.y, v_.x); }

  Dir2 reversed() const { return Dir2(unchecked(), -v_); }
  Dir2 rotated90() const { return Dir2(unchecked(), perp(v_)); }
  /// Rotate by an arbitrary angle (counter-clockwise, radians).
  Dir2 rotated(double a) const {
    const double c = std::cos(a), s = std::sin(a);
    return Dir2(unchecked(), {c * v_.x - s * v_.y, s * v_.x + c * v_.y});
  }

 private:
  struct unchecked {};
  Dir2(unchecked, const Vec2& v) : v_(v) {}
  Vec2 v_;
};

inline double dot(const Dir2& a, const Dir2& b) { return dot(a.vec(), b.vec()); }
inline double dot(const Dir2& a, const Vec2& b) { return dot(a.vec(), b); }
inline double dot(const Vec2& a, const Dir2& b) { return dot(a, b.vec()); }
inline double cross(const Dir2& a, const Dir2& b) { return cross(a.vec(), b.vec()); }
inline double cross(const Dir2& a, const Vec2& b) { return cross(a.vec(), b); }
inline double cross(const Vec2& a, const Dir2& b) { return cross(a, b.vec()); }
inline Vec2 operator*(double k, const Dir2& d) { return k * d.vec(); }
inline Vec2 operator+(const Vec2& p, const Dir2& d) { return p + d.vec(); }

}  // namespace raysplit
