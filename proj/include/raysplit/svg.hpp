#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "raysplit/arc.hpp"
#include "raysplit/geometry.hpp"
#include "raysplit/vec2.hpp"

namespace raysplit {

/// Stroke and fill styling for one scene element. Widths are in canvas
/// pixels, colours are any SVG colour string.
struct SvgStyle {
  std::string stroke = "#1a1a1a";
  double stroke_width = 1.5;
  std::string fill = "none";
  double opacity = 1.0;
  bool dashed = false;
};

/// Deterministic SVG 1.1 figure builder. Geometry is collected in world
/// coordinates and rendered once through a fixed canvas mapping: a uniform
/// scale that fits the bounding box of everything added (plus a small
/// margin), with the y axis pointing up. Elements are emitted in insertion
/// order with fixed-precision coordinates, so the output bytes depend only
/// on the calls made.
class SvgScene {
 public:
  /// Closed boundary outline, sampled uniformly in the curve parameter.
  void add_curve(const BoundaryCurve& curve, const SvgStyle& style = {});

  /// Open sub-arc of a boundary, sampled from arc.lo() to arc.hi().
  /// Empty arcs add no element.
  void add_arc(const BoundaryCurve& curve, const BoundaryArc& arc,
               const SvgStyle& style = {});

  /// Open polyline through the given world points (at least two).
  void add_polyline(const std::vector<Vec2>& points, const SvgStyle& style = {});

  /// Closed polygon through the given world points (at least two); the
  /// closing segment back to the first point is implicit, so a cycle of n
  /// bounces keeps exactly n vertices.
  void add_loop(const std::vector<Vec2>& points, const SvgStyle& style = {});

  /// Straight segment between two world points.
  void add_segment(const Vec2& a, const Vec2& b, const SvgStyle& style = {});

  /// Filled dot of fixed pixel radius (unaffected by the world scale).
  void add_point(const Vec2& p, double radius_px = 3.0,
                 const SvgStyle& style = {});

  /// Number of elements added so far (one per add_* call that drew anything).
  std::size_t element_count() const { return elements_.size(); }

  /// Render the scene to an SVG document of the given pixel size.
  std::string render(int width = 800, int height = 600) const;

  /// Render and write to a file; throws IoError when the file cannot be
  /// written.
  void write(const std::string& path, int width = 800, int height = 600) const;

 private:
  struct Element {
    enum class Kind { ClosedPath, Polyline, Point };
    Kind kind = Kind::Polyline;
    std::vector<Vec2> points;  // world coordinates; Point uses points[0]
    double radius_px = 3.0;
    SvgStyle style;
  };

  std::vector<Element> elements_;
};

}  // namespace raysplit
