#pragma once

#include "proxykit/camera.hpp"
#include "proxykit/image.hpp"
#include "proxykit/layout.hpp"
#include "proxykit/point_cloud.hpp"

#include <optional>
#include <span>
#include <vector>

namespace proxykit {

/// One view to lift into 3D. Optional maps must match the depth size;
/// color is 3-channel in [0, 1].
struct DepthFrame {
  ImageD depth;
  Intrinsics intrinsics;
  CameraPose pose;
  std::optional<ImageD> color;
  std::optional<SemanticImage> semantic;
  std::optional<InstanceImage> instance;
};

/// One point per sampled pixel with finite positive depth, at
/// origin + depth * unit ray. Pixels sampled every `stride` in x and y.
/// Throws ShapeMismatch when maps disagree in size with depth or intrinsics.
PointCloud backproject(const DepthFrame& frame, int stride = 1);

/// Backprojects all frames and merges points sharing a voxel of edge
/// `voxel_size` into their centroid with mean color and majority labels
/// (ties to the lower id). Output follows voxel index order. voxel_size <= 0
/// concatenates the frames in order.
PointCloud fuse_frames(std::span<const DepthFrame> frames, int stride = 1, double voxel_size = 0.01);

/// Voxel-grid reduction of a single cloud (same rules as fuse_frames).
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

/// Depth image of a cloud: each point lands in the pixel containing its
/// projection and the nearest range along the ray wins. Empty pixels are +inf.
ImageD rasterize_points(const PointCloud& cloud, const Intrinsics& intr, const CameraPose& pose);

/// Colors of the points that win rasterize_points (3 channels, black where empty).
ImageD rasterize_point_colors(const PointCloud& cloud, const Intrinsics& intr, const CameraPose& pose);

struct DepthErrorReport {
  double rmse_m = 0.0;
  double abs_rel = 0.0;
  std::size_t pixels = 0;
};

/// RMSE and AbsRel of `estimate` against `reference` over pixels finite and
/// positive in both. Throws ShapeMismatch or EmptyOverlap.
DepthErrorReport depth_error(std::span<const ImageD> estimate, std::span<const ImageD> reference);

/// Proxy-rendered depth at each pose against reconstruction depths.
DepthErrorReport depth_alignment_report(const SceneLayout& layout, std::span<const ImageD> reconstruction,
                                        std::span<const CameraPose> poses, const Intrinsics& intr);

/// Same, with reconstruction depth obtained by rasterizing a point cloud.
DepthErrorReport depth_alignment_report(const SceneLayout& layout, const PointCloud& cloud,
                                        std::span<const CameraPose> poses, const Intrinsics& intr);

}  // namespace proxykit
