#pragma once

#include "proxykit/geometry.hpp"
#include "proxykit/layout.hpp"
#include "proxykit/renderer.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

namespace testing_support {

using namespace proxykit;

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(PROXYKIT_DATA_DIR) / rel; }

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("proxykit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Independent ray/box oracle: intersects the six face rectangles one by
/// one and keeps the nearest positive hit.
inline std::optional<double> face_plane_hit(const Vec3& origin, const Vec3& dir, const OrientedBox& box) {
  std::optional<double> best;
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 n = box.axes.col(axis);
    for (double sign : {-1.0, 1.0}) {
      const Vec3 face_center = box.center + sign * box.half[axis] * n;
      const double denom = n.dot(dir);
      if (std::abs(denom) < 1e-15) continue;
      const double t = n.dot(face_center - origin) / denom;
      if (t < 0.0) continue;
      const Vec3 p = origin + t * dir - face_center;
      bool inside = true;
      for (int other = 0; other < 3 && inside; ++other) {
        if (other == axis) continue;
        inside = std::abs(p.dot(box.axes.col(other))) <= box.half[other] * (1.0 + 1e-12) + 1e-12;
      }
      if (inside && (!best || t < *best)) best = t;
    }
  }
  return best;
}

/// Euclidean distance from a point to a solid box, by clamping in the box frame.
inline double point_box_distance(const Vec3& p, const OrientedBox& box) {
  const Vec3 local = box.axes.transpose() * (p - box.center);
  const Vec3 clamped = local.cwiseMax(-box.half).cwiseMin(box.half);
  return (local - clamped).norm();
}

/// Brute-force scene oracle: every box through face_plane_hit, every slab as
/// the planes of its faces restricted to the outline's bounding rectangle
/// (exact for rectangular rooms).
inline SurfaceHit brute_force_hit(const ProxyScene& scene, const Vec3& o, const Vec3& d) {
  SurfaceHit best;
  for (const auto& b : scene.boxes())
    if (auto t = face_plane_hit(o, d, b.box); t && *t < best.t) best.t = *t, best.semantic = b.semantic;
  for (const auto& s : scene.slabs()) {
    Eigen::AlignedBox2d bb;
    for (const Vec2& v : s.outline) bb.extend(v);
    for (double z : {s.z_top, s.z_bottom}) {
      if (d.z() == 0.0) continue;
      const double t = (z - o.z()) / d.z();
      if (t < 0.0 || t >= best.t) continue;
      if (bb.contains(Vec3(o + t * d).head<2>())) best.t = t, best.semantic = s.semantic;
    }
  }
  return best;
}

inline double full_render_min_depth(const ProxyScene& scene, const CameraPose& pose, const Intrinsics& intr) {
  const RenderOutput out = scene.render({intr, pose, kChannelDepth});
  double m = kInf;
  for (double d : out.depth->data()) m = std::min(m, d);
  return m;
}

/// Full-resolution clearance verdict. Any rendered depth is at least the
/// distance to the nearest surface, so the render is only needed when some
/// surface lies within the threshold.
inline bool full_resolution_clear(const ProxyScene& scene, const CameraPose& pose, const Intrinsics& intr, double threshold) {
  double nearest = kInf;
  for (const auto& b : scene.boxes()) nearest = std::min(nearest, point_box_distance(pose.position, b.box));
  for (const auto& s : scene.slabs()) {
    Eigen::AlignedBox2d bb;
    for (const Vec2& v : s.outline) bb.extend(v);
    OrientedBox slab;
    slab.center << bb.center(), 0.5 * (s.z_top + s.z_bottom);
    slab.half << 0.5 * bb.sizes(), 0.5 * (s.z_top - s.z_bottom);
    nearest = std::min(nearest, point_box_distance(pose.position, slab));
  }
  if (nearest >= threshold) return true;
  return full_render_min_depth(scene, pose, intr) >= threshold;
}

inline Quat random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

/// Axis-aligned rectangular room [x0,x1] x [y0,y1] with the given height.
inline Room box_room(double x0, double y0, double x1, double y1, double height = 2.8, double thickness = 0.15) {
  Room r;
  r.floor_polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  r.floor_z = 0.0;
  r.ceiling_z = height;
  r.wall_thickness = thickness;
  return r;
}

inline SceneLayout empty_room(double width, double depth, double height = 2.8) {
  SceneLayout l;
  l.id = "empty";
  l.rooms.push_back(box_room(-width / 2, -depth / 2, width / 2, depth / 2, height));
  return l;
}

inline ProxyObject make_object(std::uint32_t id, SemanticId label, const Vec3& center, const Vec3& size,
                               double yaw = 0.0) {
  ProxyObject o;
  o.instance_id = id;
  o.semantic_label = label;
  o.pose.position = center;
  o.pose.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
  o.pose.scale = size;
  return o;
}

}  // namespace testing_support
