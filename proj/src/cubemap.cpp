#include "proxykit/cubemap.hpp"

#include "proxykit/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace proxykit {

std::string_view face_suffix(int face) {
  static constexpr std::string_view kSuffix[kCubeFaces] = {"px", "nx", "py", "ny", "pz", "nz"};
  return kSuffix[face];
}

Quat canonical_face_rotation(int face) {
  // Columns: forward, left, up.
  Mat3 r;
  switch (static_cast<CubeFace>(face)) {
    case CubeFace::pos_x: r << 1, 0, 0, 0, 1, 0, 0, 0, 1; break;
    case CubeFace::neg_x: r << -1, 0, 0, 0, -1, 0, 0, 0, 1; break;
    case CubeFace::pos_y: r << 0, -1, 0, 1, 0, 0, 0, 0, 1; break;
    case CubeFace::neg_y: r << 0, 1, 0, -1, 0, 0, 0, 0, 1; break;
    case CubeFace::pos_z: r << 0, 0, -1, 0, 1, 0, 1, 0, 0; break;
    case CubeFace::neg_z: r << 0, 0, 1, 0, 1, 0, -1, 0, 0; break;
  }
  return Quat(r);
}

CameraPose CubemapRig::face_pose(int face) const {
  return CameraPose(Quat(Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ())) * canonical_face_rotation(face), center);
}

Vec3 equirect_direction(int width, int height, double u, double v) {
  const double lon = kPi - 2.0 * kPi * u / width;
  const double lat = 0.5 * kPi - kPi * v / height;
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

Vec2 equirect_coords(int width, int height, const Vec3& dir) {
  const Vec3 d = dir.normalized();
  const double lon = std::atan2(d.y(), d.x());
  const double lat = std::asin(std::clamp(d.z(), -1.0, 1.0));
  return {(kPi - lon) / (2.0 * kPi) * width, (0.5 * kPi - lat) / kPi * height};
}

void sample_equirect(const ImageD& img, double u, double v, double* out) {
  const int w = img.width(), h = img.height(), ch = img.channels();
  const double x = u - 0.5;
  const double y = std::clamp(v - 0.5, 0.0, static_cast<double>(h - 1));
  const double fx = std::floor(x), fy = std::floor(y);
  const double ax = x - fx, ay = y - fy;
  const int x0 = ((static_cast<int>(fx) % w) + w) % w;
  const int x1 = (x0 + 1) % w;
  const int y0 = static_cast<int>(fy);
  const int y1 = std::min(y0 + 1, h - 1);
  for (int c = 0; c < ch; ++c) {
    out[c] = (1 - ay) * ((1 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c)) +
             ay * ((1 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c));
  }
}

void sample_clamped(const ImageD& img, double px, double py, double* out) {
  const int w = img.width(), h = img.height(), ch = img.channels();
  const double x = std::clamp(px - 0.5, 0.0, static_cast<double>(w - 1));
  const double y = std::clamp(py - 0.5, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double ax = x - x0, ay = y - y0;
  for (int c = 0; c < ch; ++c) {
    out[c] = (1 - ay) * ((1 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c)) +
             ay * ((1 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c));
  }
}

Cubemap<double> equirect_to_cubemap(const ImageD& equirect, int face_size, double face_fov_deg, double yaw_rad) {
  if (equirect.width() != 2 * equirect.height())
    throw DimensionError("equirectangular image must have width = 2 * height");
  const CubemapRig rig{Vec3::Zero(), yaw_rad, face_fov_deg};
  const Intrinsics intr = rig.face_intrinsics(face_size);
  Cubemap<double> out;
  out.face_fov_deg = face_fov_deg;
  out.yaw_rad = yaw_rad;
  const int ch = equirect.channels();
  for (int f = 0; f < kCubeFaces; ++f) {
    ImageD face(face_size, face_size, ch);
    const CameraPose pose = rig.face_pose(f);
    parallel_for(face_size, [&](std::size_t y) {
      for (int x = 0; x < face_size; ++x) {
        const Vec3 d = pixel_center_ray(intr, pose, x, static_cast<int>(y)).direction;
        const Vec2 uv = equirect_coords(equirect.width(), equirect.height(), d);
        sample_equirect(equirect, uv.x(), uv.y(), &face.at(x, static_cast<int>(y)));
      }
    });
    out.faces[f] = std::move(face);
  }
  return out;
}

ImageD cubemap_to_equirect(const Cubemap<double>& cubemap, int width, int height) {
  const CubemapRig rig = cubemap.rig();
  const Intrinsics intr = rig.face_intrinsics(cubemap.face_size());
  std::array<CameraPose, kCubeFaces> poses;
  for (int f = 0; f < kCubeFaces; ++f) poses[f] = rig.face_pose(f);
  const int ch = cubemap.faces[0].channels();
  ImageD out(width, height, ch);
  parallel_for(height, [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < width; ++x) {
      const Vec3 d = equirect_direction(width, height, x + 0.5, y + 0.5);
      int best = 0;
      double best_dot = -kInf;
      for (int f = 0; f < kCubeFaces; ++f) {
        const double dot = poses[f].forward().dot(d);
        if (dot > best_dot) {
          best_dot = dot;
          best = f;
        }
      }
      const Vec2 p = *project(intr, poses[best], poses[best].position + d);
      sample_clamped(cubemap.faces[best], p.x(), p.y(), &out.at(x, y));
    }
  });
  return out;
}

Vec2 crop_source_coords(int out_size, double in_fov_deg, int in_size, double px, double py) {
  const Intrinsics out_intr{out_size, out_size, 90.0};
  const Intrinsics in_intr{in_size, in_size, in_fov_deg};
  const Vec3 d = camera_ray_direction(out_intr, px, py);
  const double f = in_intr.focal();
  return {0.5 * in_size - f * d.y() / d.x(), 0.5 * in_size - f * d.z() / d.x()};
}

Cubemap<double> crop_overlap(const Cubemap<double>& cubemap, int out_size) {
  Cubemap<double> out;
  out.kind = cubemap.kind;
  out.face_fov_deg = 90.0;
  out.yaw_rad = cubemap.yaw_rad;
  const CubemapRig rig = cubemap.rig();
  const int in_size = cubemap.face_size();
  for (int f = 0; f < kCubeFaces; ++f) {
    const ImageD& src = cubemap.faces[f];
    const int ch = src.channels();
    ImageD face(out_size, out_size, ch);
    const Quat to_cam = rig.face_pose(f).rotation.conjugate();
    const Quat to_world = rig.face_pose(f).rotation;
    parallel_for(out_size, [&](std::size_t yy) {
      const int y = static_cast<int>(yy);
      for (int x = 0; x < out_size; ++x) {
        const Vec2 s = crop_source_coords(out_size, cubemap.face_fov_deg, in_size, x + 0.5, y + 0.5);
        if (cubemap.kind != ChannelKind::xyz_dir || ch != 3) {
          sample_clamped(src, s.x(), s.y(), &face.at(x, y));
          continue;
        }
        // Directions divided by their forward component are affine in the
        // image coordinates, so bilinear weights reproduce them exactly.
        const double sx = std::clamp(s.x() - 0.5, 0.0, static_cast<double>(in_size - 1));
        const double sy = std::clamp(s.y() - 0.5, 0.0, static_cast<double>(in_size - 1));
        const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
        const int x1 = std::min(x0 + 1, in_size - 1), y1 = std::min(y0 + 1, in_size - 1);
        const double ax = sx - x0, ay = sy - y0;
        auto tangent = [&](int px, int py) {
          Vec3 c = to_cam * Vec3(src.at(px, py, 0), src.at(px, py, 1), src.at(px, py, 2));
          return Vec3(c / c.x());
        };
        Vec3 t = (1 - ay) * ((1 - ax) * tangent(x0, y0) + ax * tangent(x1, y0)) +
                 ay * ((1 - ax) * tangent(x0, y1) + ax * tangent(x1, y1));
        const Vec3 w = (to_world * t).normalized();
        for (int c = 0; c < 3; ++c) face.at(x, y, c) = w[c];
      }
    });
    out.faces[f] = std::move(face);
  }
  return out;
}

Cubemap<double> xyz_positional_encoding(const CubemapRig& rig, int face_size) {
  Cubemap<double> out;
  out.kind = ChannelKind::xyz_dir;
  out.face_fov_deg = rig.face_fov_deg;
  out.yaw_rad = rig.yaw_rad;
  const Intrinsics intr = rig.face_intrinsics(face_size);
  for (int f = 0; f < kCubeFaces; ++f) {
    ImageD face(face_size, face_size, 3);
    const CameraPose pose = rig.face_pose(f);
    parallel_for(face_size, [&](std::size_t y) {
      for (int x = 0; x < face_size; ++x) {
        const Vec3 d = pixel_center_ray(intr, pose, x, static_cast<int>(y)).direction;
        for (int c = 0; c < 3; ++c) face.at(x, static_cast<int>(y), c) = d[c];
      }
    });
    out.faces[f] = std::move(face);
  }
  return out;
}

}  // namespace proxykit
