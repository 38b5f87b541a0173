#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <limits>
#include <optional>

namespace proxykit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Box with center, orientation (columns are the local axes in world frame)
/// and half extents along those axes.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 half = Vec3::Constant(0.5);

  Vec3 to_local(const Vec3& p) const { return axes.transpose() * (p - center); }
  Vec3 to_world(const Vec3& local) const { return center + axes * local; }
  std::array<Vec3, 8> corners() const;
  /// World-space axis-aligned bounds.
  Eigen::AlignedBox3d bounds() const;
  bool contains(const Vec3& p, double margin = 0.0) const;
};

/// Separating-axis overlap test. Boxes overlap when they share volume deeper
/// than `tolerance` along every candidate axis (touching boxes do not overlap
/// for tolerance >= 0).
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b, double tolerance = 0.0);

struct BoxHit {
  double t = kInf;
  Vec3 normal = Vec3::Zero();  // world-space outward normal of the hit face
};

/// Slab-method ray/box intersection. Returns the entry distance, or the exit
/// distance when the origin lies inside the box. `dir` must be unit length.
std::optional<BoxHit> intersect_ray_box(const Vec3& origin, const Vec3& dir, const OrientedBox& box);

/// Euclidean distance from a point to a solid box (0 inside).
double distance_point_box(const Vec3& p, const OrientedBox& box);

/// Rotation about +Z.
inline Mat3 yaw_rotation(double yaw_rad) {
  return Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ()).toRotationMatrix();
}

/// Geodesic angle between two rotations, radians in [0, pi].
double rotation_angle_between(const Quat& a, const Quat& b);

}  // namespace proxykit
