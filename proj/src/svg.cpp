#include "raysplit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "raysplit/errors.hpp"

namespace raysplit {

namespace {

constexpr int kCurveSamples = 256;  // closed outline resolution
constexpr double kMarginFrac = 0.05;

std::string fmt(double v) {
  // Fixed decimal notation keeps the output stable and diff-friendly;
  // canvas units are pixels, so four places are far below visible.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void append_style(std::ostringstream& out, const SvgStyle& st, bool filled) {
  out << "stroke=\"" << st.stroke << "\" stroke-width=\"" << fmt(st.stroke_width)
      << "\" fill=\"" << (filled ? st.stroke : st.fill) << "\"";
  if (st.opacity != 1.0) out << " opacity=\"" << fmt(st.opacity) << "\"";
  if (st.dashed) out << " stroke-dasharray=\"6 4\"";
}

}  // namespace

void SvgScene::add_curve(const BoundaryCurve& curve, const SvgStyle& style) {
  Element el;
  el.kind = Element::Kind::ClosedPath;
  el.style = style;
  el.points.reserve(kCurveSamples);
  for (int i = 0; i < kCurveSamples; ++i) {
    el.points.push_back(curve.point_at(static_cast<double>(i) / kCurveSamples));
  }
  elements_.push_back(std::move(el));
}

void SvgScene::add_arc(const BoundaryCurve& curve, const BoundaryArc& arc,
                       const SvgStyle& style) {
  if (arc.empty()) return;
  Element el;
  el.kind = Element::Kind::Polyline;
  el.style = style;
  int n = std::max(2, static_cast<int>(std::ceil(arc.span * kCurveSamples)) + 1);
  el.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    double s = arc.lo + arc.span * i / (n - 1);
    el.points.push_back(curve.point_at(s));
  }
  elements_.push_back(std::move(el));
}

void SvgScene::add_polyline(const std::vector<Vec2>& points,
                            const SvgStyle& style) {
  if (points.size() < 2) return;
  Element el;
  el.kind = Element::Kind::Polyline;
  el.style = style;
  el.points = points;
  elements_.push_back(std::move(el));
}

void SvgScene::add_loop(const std::vector<Vec2>& points, const SvgStyle& style) {
  if (points.size() < 2) return;
  Element el;
  el.kind = Element::Kind::ClosedPath;
  el.style = style;
  el.points = points;
  elements_.push_back(std::move(el));
}

void SvgScene::add_segment(const Vec2& a, const Vec2& b, const SvgStyle& style) {
  add_polyline({a, b}, style);
}

void SvgScene::add_point(const Vec2& p, double radius_px, const SvgStyle& style) {
  Element el;
  el.kind = Element::Kind::Point;
  el.style = style;
  el.points = {p};
  el.radius_px = radius_px;
  elements_.push_back(std::move(el));
}

std::string SvgScene::render(int width, int height) const {
  // World bounding box over every stored vertex.
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool first = true;
  for (const Element& el : elements_) {
    for (const Vec2& p : el.points) {
      if (first) {
        xmin = xmax = p.x;
        ymin = ymax = p.y;
        first = false;
      } else {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
      }
    }
  }
  double spanx = std::max(xmax - xmin, 1e-12);
  double spany = std::max(ymax - ymin, 1e-12);
  double margin = kMarginFrac * std::max(spanx, spany);
  xmin -= margin;
  xmax += margin;
  ymin -= margin;
  ymax += margin;
  spanx = xmax - xmin;
  spany = ymax - ymin;

  // Uniform scale, centred; y flips so the world y axis points up.
  double scale = std::min(width / spanx, height / spany);
  double ox = (width - scale * spanx) / 2.0;
  double oy = (height - scale * spany) / 2.0;
  auto cx = [&](double x) { return ox + scale * (x - xmin); };
  auto cy = [&](double y) { return oy + scale * (ymax - y); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
      << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  for (const Element& el : elements_) {
    switch (el.kind) {
      case Element::Kind::ClosedPath:
      case Element::Kind::Polyline: {
        out << "<path d=\"";
        for (std::size_t i = 0; i < el.points.size(); ++i) {
          out << (i == 0 ? "M" : " L") << fmt(cx(el.points[i].x)) << " "
              << fmt(cy(el.points[i].y));
        }
        if (el.kind == Element::Kind::ClosedPath) out << " Z";
        out << "\" ";
        append_style(out, el.style, /*filled=*/false);
        out << "/>\n";
        break;
      }
      case Element::Kind::Point: {
        out << "<circle cx=\"" << fmt(cx(el.points[0].x)) << "\" cy=\""
            << fmt(cy(el.points[0].y)) << "\" r=\"" << fmt(el.radius_px)
            << "\" ";
        append_style(out, el.style, /*filled=*/true);
        out << "/>\n";
        break;
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

void SvgScene::write(const std::string& path, int width, int height) const {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << render(width, height);
  if (!file) throw IoError("write failed: " + path);
}

}  // namespace raysplit
