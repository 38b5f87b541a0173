#pragma once

#include "proxykit/geometry.hpp"

#include <optional>

namespace proxykit {

/// Pinhole intrinsics: square pixels, principal point at the image center,
/// horizontal field of view in degrees.
struct Intrinsics {
  int width = 576;
  int height = 576;
  double fov_deg = 72.0;

  /// Focal length in pixels.
  double focal() const;
  /// Throws DimensionError when out of range.
  void check() const;
  Intrinsics resized(int w, int h) const { return {w, h, fov_deg}; }

  bool operator==(const Intrinsics&) const = default;
};

/// Camera-to-world rigid transform. Camera frame: +X forward, +Y left,
/// +Z up, so the identity pose looks along world +X with +Z up.
struct CameraPose {
  Quat rotation = Quat::Identity();  // world <- camera
  Vec3 position = Vec3::Zero();

  CameraPose() = default;
  CameraPose(const Quat& q, const Vec3& p) : rotation(q.normalized()), position(p) {}

  Vec3 forward() const { return rotation * Vec3::UnitX(); }
  Vec3 left() const { return rotation * Vec3::UnitY(); }
  Vec3 up() const { return rotation * Vec3::UnitZ(); }
  Vec3 to_camera(const Vec3& world) const { return rotation.conjugate() * (world - position); }
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

/// Unit direction in the camera frame through continuous image coordinates
/// (px, py); pixel (i, j) spans [i, i+1) x [j, j+1), +y down the image.
Vec3 camera_ray_direction(const Intrinsics& intr, double px, double py);

/// World-space ray through continuous image coordinates.
Ray pixel_ray(const Intrinsics& intr, const CameraPose& pose, double px, double py);

/// Ray through the center of pixel (x, y).
inline Ray pixel_center_ray(const Intrinsics& intr, const CameraPose& pose, int x, int y) {
  return pixel_ray(intr, pose, x + 0.5, y + 0.5);
}

/// Continuous image coordinates of a world point in front of the camera.
std::optional<Vec2> project(const Intrinsics& intr, const CameraPose& pose, const Vec3& world);

/// Pose at `position` looking at `target`, roll-free with respect to `up`.
/// Throws DegenerateInput when position == target or up is parallel to the view.
CameraPose look_at(const Vec3& position, const Vec3& target, const Vec3& up = Vec3::UnitZ());

/// Pose from yaw about +Z and pitch (positive looks up), zero roll.
CameraPose yaw_pitch_pose(const Vec3& position, double yaw_rad, double pitch_rad);

}  // namespace proxykit
