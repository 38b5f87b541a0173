#include "proxykit/camera.hpp"

#include "proxykit/errors.hpp"

#include <cmath>

namespace proxykit {

double Intrinsics::focal() const { return 0.5 * width / std::tan(0.5 * deg2rad(fov_deg)); }

void Intrinsics::check() const {
  if (width < 1 || height < 1) throw DimensionError("intrinsics: image size must be >= 1");
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw DimensionError("intrinsics: fov must be in (0, 180)");
}

Vec3 camera_ray_direction(const Intrinsics& intr, double px, double py) {
  const double f = intr.focal();
  Vec3 d(1.0, -(px - 0.5 * intr.width) / f, -(py - 0.5 * intr.height) / f);
  return d.normalized();
}

Ray pixel_ray(const Intrinsics& intr, const CameraPose& pose, double px, double py) {
  return {pose.position, (pose.rotation * camera_ray_direction(intr, px, py)).normalized()};
}

std::optional<Vec2> project(const Intrinsics& intr, const CameraPose& pose, const Vec3& world) {
  const Vec3 c = pose.to_camera(world);
  if (c.x() <= 0.0) return std::nullopt;
  const double f = intr.focal();
  return Vec2(0.5 * intr.width - f * c.y() / c.x(), 0.5 * intr.height - f * c.z() / c.x());
}

CameraPose look_at(const Vec3& position, const Vec3& target, const Vec3& up) {
  const Vec3 diff = target - position;
  if (diff.norm() < 1e-12) throw DegenerateInput("look_at: position equals target");
  const Vec3 fwd = diff.normalized();
  const Vec3 left_raw = up.cross(fwd);
  if (left_raw.norm() < 1e-9 * up.norm()) throw DegenerateInput("look_at: up is parallel to view direction");
  const Vec3 left = left_raw.normalized();
  const Vec3 cam_up = fwd.cross(left);
  Mat3 r;
  r.col(0) = fwd;
  r.col(1) = left;
  r.col(2) = cam_up;
  return CameraPose(Quat(r), position);
}

CameraPose yaw_pitch_pose(const Vec3& position, double yaw_rad, double pitch_rad) {
  const Quat q = Quat(Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ())) * Quat(Eigen::AngleAxisd(-pitch_rad, Vec3::UnitY()));
  return CameraPose(q, position);
}

}  // namespace proxykit
