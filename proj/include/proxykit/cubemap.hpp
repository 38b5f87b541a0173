#pragma once

#include "proxykit/camera.hpp"
#include "proxykit/image.hpp"

#include <array>
#include <string_view>

namespace proxykit {

/// Face order follows the conventional cross layout.
enum class CubeFace : int { pos_x = 0, neg_x, pos_y, neg_y, pos_z, neg_z };
inline constexpr int kCubeFaces = 6;

/// File-name suffix: px, nx, py, ny, pz, nz.
std::string_view face_suffix(int face);

/// Canonical world <- camera rotation of a face (before rig yaw). Side faces
/// keep +Z up; +Z has image-up toward -X and -Z has image-up toward +X, so
/// both poles share their +X edge rows with the +X face.
Quat canonical_face_rotation(int face);

struct CubemapRig {
  Vec3 center = Vec3::Zero();
  double yaw_rad = 0.0;
  double face_fov_deg = 90.0;

  CameraPose face_pose(int face) const;
  Intrinsics face_intrinsics(int face_size) const { return {face_size, face_size, face_fov_deg}; }
};

enum class ChannelKind { depth_m, semantic_id, instance_id, rgb, xyz_dir };

template <class T>
struct Cubemap {
  std::array<Image<T>, kCubeFaces> faces;
  ChannelKind kind = ChannelKind::rgb;
  double face_fov_deg = 90.0;
  double yaw_rad = 0.0;

  int face_size() const { return faces[0].width(); }
  CubemapRig rig(const Vec3& center = Vec3::Zero()) const { return {center, yaw_rad, face_fov_deg}; }
};

/// Unit world direction of an equirectangular pixel-center coordinate.
/// Column W/2 looks along +X; columns increase to the viewer's right.
Vec3 equirect_direction(int width, int height, double u, double v);
/// Continuous equirectangular coordinates of a direction.
Vec2 equirect_coords(int width, int height, const Vec3& dir);

/// Bilinear sample with horizontal wrap and vertical clamp.
void sample_equirect(const ImageD& img, double u, double v, double* out);
/// Bilinear sample with edge clamping.
void sample_clamped(const ImageD& img, double px, double py, double* out);

/// Resamples a W x H (W = 2H) equirectangular image into six perspective
/// faces. Throws DimensionError when W != 2H.
Cubemap<double> equirect_to_cubemap(const ImageD& equirect, int face_size, double face_fov_deg,
                                    double yaw_rad = 0.0);

/// Inverse mapping; each output pixel samples the face whose axis is closest.
ImageD cubemap_to_equirect(const Cubemap<double>& cubemap, int width, int height);

/// Continuous source coordinates, in a face of fov `in_fov_deg` and size
/// `in_size`, of pixel-center coordinate (px, py) of a 90 degree face of size `out_size`.
Vec2 crop_source_coords(int out_size, double in_fov_deg, int in_size, double px, double py);

/// Crops overlapping faces (fov > 90) back to 90 degree faces of `out_size`.
/// xyz_dir cubemaps are interpolated on the tangent plane, which is exact
/// for direction fields; other kinds use bilinear sampling.
Cubemap<double> crop_overlap(const Cubemap<double>& cubemap, int out_size);

/// Per-pixel unit world ray direction (channel kind xyz_dir).
Cubemap<double> xyz_positional_encoding(const CubemapRig& rig, int face_size);

}  // namespace proxykit
