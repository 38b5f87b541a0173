#include "proxykit/structure.hpp"

#include <algorithm>
#include <cmath>

namespace proxykit {

std::vector<OrientedBox> wall_segments(const Room& room) {
  std::vector<OrientedBox> out;
  const auto& poly = room.floor_polygon;
  const double t = room.wall_thickness;
  // Outward side of each edge depends on winding.
  const double orient = signed_area(poly) >= 0.0 ? 1.0 : -1.0;
  const double z0 = room.floor_z - t;
  const double z1 = room.ceiling_z + t;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double len = (b - a).norm();
    if (len < 1e-12) continue;
    const Vec2 u = (b - a) / len;
    const Vec2 outward = orient * Vec2(u.y(), -u.x());
    const Vec2 mid = 0.5 * (a + b) + outward * (0.5 * t);

    OrientedBox box;
    box.center = Vec3(mid.x(), mid.y(), 0.5 * (z0 + z1));
    const Vec3 ax(u.x(), u.y(), 0.0);
    box.axes.col(0) = ax;
    box.axes.col(1) = Vec3::UnitZ().cross(ax);
    box.axes.col(2) = Vec3::UnitZ();
    box.half = Vec3(0.5 * len + t, 0.5 * t, 0.5 * (z1 - z0));
    out.push_back(box);
  }
  return out;
}

namespace {

struct Rect {
  double s0, s1, z0, z1;
  bool empty() const { return s1 - s0 <= 1e-9 || z1 - z0 <= 1e-9; }
};

OrientedBox rect_to_box(const OrientedBox& wall, const Rect& r) {
  OrientedBox b = wall;
  const Vec3 local((r.s0 + r.s1) * 0.5, 0.0, (r.z0 + r.z1) * 0.5);
  b.center = wall.to_world(local);
  b.half = Vec3(0.5 * (r.s1 - r.s0), wall.half.y(), 0.5 * (r.z1 - r.z0));
  return b;
}

}  // namespace

std::vector<OrientedBox> cut_wall(const OrientedBox& wall, std::span<const OrientedBox> cutters) {
  std::vector<Rect> pieces = {{-wall.half.x(), wall.half.x(), -wall.half.z(), wall.half.z()}};
  bool any_cut = false;
  for (const auto& cutter : cutters) {
    if (!boxes_overlap(wall, cutter, 0.0)) continue;
    any_cut = true;
    double s0 = kInf, s1 = -kInf, z0 = kInf, z1 = -kInf;
    for (const Vec3& c : cutter.corners()) {
      Vec3 l = wall.to_local(c);
      s0 = std::min(s0, l.x());
      s1 = std::max(s1, l.x());
      z0 = std::min(z0, l.z());
      z1 = std::max(z1, l.z());
    }
    std::vector<Rect> next;
    for (const Rect& p : pieces) {
      const double cs0 = std::max(p.s0, s0), cs1 = std::min(p.s1, s1);
      const double cz0 = std::max(p.z0, z0), cz1 = std::min(p.z1, z1);
      if (cs1 <= cs0 || cz1 <= cz0) {
        next.push_back(p);
        continue;
      }
      const Rect parts[4] = {{p.s0, cs0, p.z0, p.z1},
                             {cs1, p.s1, p.z0, p.z1},
                             {cs0, cs1, p.z0, cz0},
                             {cs0, cs1, cz1, p.z1}};
      for (const Rect& r : parts)
        if (!r.empty()) next.push_back(r);
    }
    pieces = std::move(next);
  }
  if (!any_cut) return {wall};
  std::vector<OrientedBox> out;
  out.reserve(pieces.size());
  for (const Rect& r : pieces) out.push_back(rect_to_box(wall, r));
  return out;
}

std::vector<OrientedBox> wall_cutters(const SceneLayout& layout) {
  std::vector<OrientedBox> out;
  for (const auto& c : layout.connectors) out.push_back(c.pose.box());
  for (const auto& r : layout.rooms)
    for (const auto& o : r.openings) out.push_back(o.box());
  return out;
}

Polygon2 slab_outline(const Room& room) { return inflate_polygon(room.floor_polygon, room.wall_thickness); }

}  // namespace proxykit
