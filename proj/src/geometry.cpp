#include "proxykit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace proxykit {

std::array<Vec3, 8> OrientedBox::corners() const {
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    out[i] = to_world(s.cwiseProduct(half));
  }
  return out;
}

Eigen::AlignedBox3d OrientedBox::bounds() const {
  Vec3 ext = axes.cwiseAbs() * half;
  return {center - ext, center + ext};
}

bool OrientedBox::contains(const Vec3& p, double margin) const {
  Vec3 l = to_local(p).cwiseAbs();
  return (l.array() <= (half.array() + margin)).all();
}

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b, double tolerance) {
  // Rotation of b expressed in a's frame.
  const Mat3 r = a.axes.transpose() * b.axes;
  const Mat3 abs_r = r.cwiseAbs();
  // Padded copy for the cross-product axes, where near-parallel edges make the test ill-conditioned.
  const Mat3 abs_r_eps = abs_r.array() + 1e-12;
  const Vec3 t = a.axes.transpose() * (b.center - a.center);

  for (int i = 0; i < 3; ++i) {
    double ra = a.half[i];
    double rb = abs_r.row(i).dot(b.half);
    if (std::abs(t[i]) >= ra + rb - tolerance) return false;
  }
  for (int j = 0; j < 3; ++j) {
    double ra = abs_r.col(j).dot(a.half);
    double rb = b.half[j];
    if (std::abs(r.col(j).dot(t)) >= ra + rb - tolerance) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      double ra = a.half[i1] * abs_r_eps(i2, j) + a.half[i2] * abs_r_eps(i1, j);
      double rb = b.half[j1] * abs_r_eps(i, j2) + b.half[j2] * abs_r_eps(i, j1);
      double dist = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
      // Cross-product axes are unnormalized; scale tolerance accordingly.
      double axis_len = std::sqrt(std::max(0.0, 1.0 - r(i, j) * r(i, j)));
      if (axis_len < 1e-9) continue;
      if (dist >= ra + rb - tolerance * axis_len) return false;
    }
  }
  return true;
}

std::optional<BoxHit> intersect_ray_box(const Vec3& origin, const Vec3& dir, const OrientedBox& box) {
  const Vec3 o = box.to_local(origin);
  const Vec3 d = box.axes.transpose() * dir;

  double t_near = -kInf, t_far = kInf;
  int near_axis = -1, far_axis = -1;
  double near_sign = 0.0, far_sign = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (std::abs(o[k]) > box.half[k]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d[k];
    double t0 = (-box.half[k] - o[k]) * inv;
    double t1 = (box.half[k] - o[k]) * inv;
    // Entering face normal points against the ray direction along this axis.
    double s0 = d[k] > 0 ? -1.0 : 1.0;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      near_axis = k;
      near_sign = s0;
    }
    if (t1 < t_far) {
      t_far = t1;
      far_axis = k;
      far_sign = -s0;
    }
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;

  BoxHit hit;
  if (t_near >= 0.0) {
    hit.t = t_near;
    if (near_axis >= 0) hit.normal = box.axes.col(near_axis) * near_sign;
  } else {
    // Origin inside: the visible surface is the exit face, seen from within.
    hit.t = t_far;
    if (far_axis >= 0) hit.normal = -box.axes.col(far_axis) * far_sign;
  }
  return hit;
}

double distance_point_box(const Vec3& p, const OrientedBox& box) {
  Vec3 l = box.to_local(p).cwiseAbs() - box.half;
  return l.cwiseMax(0.0).norm();
}

double rotation_angle_between(const Quat& a, const Quat& b) {
  const Quat q = a.normalized().conjugate() * b.normalized();
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

}  // namespace proxykit
