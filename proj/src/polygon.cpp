#include "proxykit/polygon.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include <algorithm>
#include <cmath>

namespace proxykit {
namespace bg = boost::geometry;

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;  // clockwise, closed
using BMulti = bg::model::multi_polygon<BPolygon>;

BPolygon to_boost(std::span<const Vec2> poly) {
  BPolygon out;
  for (const auto& v : poly) bg::append(out.outer(), BPoint(v.x(), v.y()));
  bg::correct(out);
  return out;
}

BMulti buffered(const BPolygon& poly, double distance) {
  const bg::strategy::buffer::distance_symmetric<double> dist(distance);
  const bg::strategy::buffer::join_miter join;
  const bg::strategy::buffer::end_flat end;
  const bg::strategy::buffer::point_square point;
  const bg::strategy::buffer::side_straight side;
  BMulti out;
  bg::buffer(poly, out, dist, side, join, end, point);
  return out;
}

Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace

double signed_area(std::span<const Vec2> poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(const Vec2& p, std::span<const Vec2> poly) {
  return (closest_boundary_point(p, poly) - p).norm();
}

Vec2 closest_boundary_point(const Vec2& p, std::span<const Vec2> poly) {
  Vec2 best = poly.front();
  double best_d = kInf;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    Vec2 c = closest_on_segment(p, poly[i], poly[(i + 1) % n]);
    double d = (c - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Vec2 area_centroid(std::span<const Vec2> poly) {
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    double cross = p.x() * q.y() - q.x() * p.y();
    a += cross;
    c += (p + q) * cross;
  }
  if (std::abs(a) < 1e-15) {
    Vec2 mean = Vec2::Zero();
    for (const auto& v : poly) mean += v;
    return mean / static_cast<double>(poly.size());
  }
  return c / (3.0 * a);
}

bool is_simple_polygon(std::span<const Vec2> poly) {
  if (poly.size() < 3) return false;
  BPolygon b = to_boost(poly);
  return bg::is_simple(b) && bg::is_valid(b);
}

double overlap_area(std::span<const Vec2> a, std::span<const Vec2> b, double shrink,
                    std::span<const Polygon2> exclusions) {
  BMulti sa = buffered(to_boost(a), -shrink);
  BMulti sb = buffered(to_boost(b), -shrink);
  BMulti inter;
  bg::intersection(sa, sb, inter);
  for (const auto& ex : exclusions) {
    BMulti rest;
    bg::difference(inter, to_boost(ex), rest);
    inter = std::move(rest);
  }
  return bg::area(inter);
}

Polygon2 inflate_polygon(std::span<const Vec2> poly, double distance) {
  BMulti grown = buffered(to_boost(poly), distance);
  Polygon2 out;
  if (grown.empty()) return Polygon2(poly.begin(), poly.end());
  const auto& ring = grown.front().outer();
  // Drop the closing point; return counter-clockwise.
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) out.emplace_back(ring[i].x(), ring[i].y());
  if (signed_area(out) < 0) std::reverse(out.begin(), out.end());
  return out;
}

Polygon2 box_footprint(const OrientedBox& box) {
  // Footprint of the XY projection; exact for yaw-only boxes, bounding for tilted ones.
  Vec2 ex = box.axes.block<2, 1>(0, 0) * box.half.x();
  Vec2 ey = box.axes.block<2, 1>(0, 1) * box.half.y();
  Vec2 ez = box.axes.block<2, 1>(0, 2) * box.half.z();
  Vec2 c = box.center.head<2>();
  if (ez.norm() > 1e-9) {
    // Tilted box: fall back to the axis-aligned bounds of the projection.
    auto bb = box.bounds();
    return {Vec2(bb.min().x(), bb.min().y()), Vec2(bb.max().x(), bb.min().y()),
            Vec2(bb.max().x(), bb.max().y()), Vec2(bb.min().x(), bb.max().y())};
  }
  Polygon2 out = {c - ex - ey, c + ex - ey, c + ex + ey, c - ex + ey};
  if (signed_area(out) < 0) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace proxykit
