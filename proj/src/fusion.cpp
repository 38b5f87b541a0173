#include "proxykit/fusion.hpp"

#include "proxykit/errors.hpp"
#include "proxykit/parallel.hpp"
#include "proxykit/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace proxykit {

PointCloud backproject(const DepthFrame& frame, int stride) {
  if (stride < 1) throw DimensionError("backproject: stride must be >= 1");
  const ImageD& depth = frame.depth;
  if (depth.width() != frame.intrinsics.width || depth.height() != frame.intrinsics.height || depth.channels() != 1)
    throw ShapeMismatch("backproject: depth size differs from intrinsics");
  if (frame.color && (!frame.color->same_size(depth) || frame.color->channels() != 3))
    throw ShapeMismatch("backproject: color map size differs from depth");
  if (frame.semantic && !frame.semantic->same_size(depth)) throw ShapeMismatch("backproject: semantic map size differs");
  if (frame.instance && !frame.instance->same_size(depth)) throw ShapeMismatch("backproject: instance map size differs");

  PointCloud cloud;
  for (int y = 0; y < depth.height(); y += stride) {
    for (int x = 0; x < depth.width(); x += stride) {
      const double d = depth.at(x, y);
      if (!std::isfinite(d) || d <= 0.0) continue;
      const Ray ray = pixel_center_ray(frame.intrinsics, frame.pose, x, y);
      cloud.positions.push_back(ray.origin + d * ray.direction);
      if (frame.color)
        cloud.colors.emplace_back(static_cast<float>(frame.color->at(x, y, 0)), static_cast<float>(frame.color->at(x, y, 1)),
                                  static_cast<float>(frame.color->at(x, y, 2)));
      if (frame.semantic) cloud.semantic.push_back(frame.semantic->at(x, y));
      if (frame.instance) cloud.instance.push_back(frame.instance->at(x, y));
    }
  }
  return cloud;
}

namespace {

template <class T>
T majority(std::map<T, int>& votes) {
  T best{};
  int count = -1;
  for (const auto& [id, n] : votes)  // ascending id: ties keep the lower one
    if (n > count) {
      best = id;
      count = n;
    }
  return best;
}

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  cloud.check();
  if (!(voxel_size > 0.0)) return cloud;
  using Key = std::array<std::int64_t, 3>;
  std::map<Key, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 q = (cloud.positions[i] / voxel_size).array().floor();
    cells[{static_cast<std::int64_t>(q.x()), static_cast<std::int64_t>(q.y()), static_cast<std::int64_t>(q.z())}].push_back(i);
  }
  PointCloud out;
  out.positions.reserve(cells.size());
  for (const auto& [key, members] : cells) {
    Vec3 p = Vec3::Zero();
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    std::map<SemanticId, int> sem_votes;
    std::map<std::uint32_t, int> inst_votes;
    for (std::size_t i : members) {
      p += cloud.positions[i];
      if (cloud.has_colors()) c += cloud.colors[i].cast<double>();
      if (cloud.has_semantic()) ++sem_votes[cloud.semantic[i]];
      if (cloud.has_instance()) ++inst_votes[cloud.instance[i]];
    }
    const double n = static_cast<double>(members.size());
    out.positions.push_back(p / n);
    if (cloud.has_colors()) out.colors.push_back((c / n).cast<float>());
    if (cloud.has_semantic()) out.semantic.push_back(majority(sem_votes));
    if (cloud.has_instance()) out.instance.push_back(majority(inst_votes));
  }
  return out;
}

PointCloud fuse_frames(std::span<const DepthFrame> frames, int stride, double voxel_size) {
  if (frames.empty()) throw DimensionError("fuse_frames: no frames");
  std::vector<PointCloud> parts(frames.size());
  parallel_for(frames.size(), [&](std::size_t i) { parts[i] = backproject(frames[i], stride); });
  PointCloud all;
  for (const auto& part : parts) all.append(part);
  return voxel_downsample(all, voxel_size);
}

namespace {

/// Index of the nearest point per pixel (-1 where empty) and its range.
std::vector<std::ptrdiff_t> nearest_per_pixel(const PointCloud& cloud, const Intrinsics& intr, const CameraPose& pose,
                                              ImageD& depth) {
  intr.check();
  depth = ImageD(intr.width, intr.height, 1, kInf);
  std::vector<std::ptrdiff_t> winner(depth.pixel_count(), -1);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    const auto uv = project(intr, pose, p);
    if (!uv) continue;
    const int x = static_cast<int>(std::floor(uv->x()));
    const int y = static_cast<int>(std::floor(uv->y()));
    if (x < 0 || y < 0 || x >= intr.width || y >= intr.height) continue;
    const double r = (p - pose.position).norm();
    double& d = depth.at(x, y);
    if (r < d) {
      d = r;
      winner[static_cast<std::size_t>(y) * intr.width + x] = static_cast<std::ptrdiff_t>(i);
    }
  }
  return winner;
}

}  // namespace

ImageD rasterize_points(const PointCloud& cloud, const Intrinsics& intr, const CameraPose& pose) {
  ImageD depth;
  nearest_per_pixel(cloud, intr, pose, depth);
  return depth;
}

ImageD rasterize_point_colors(const PointCloud& cloud, const Intrinsics& intr, const CameraPose& pose) {
  ImageD depth;
  const auto winner = nearest_per_pixel(cloud, intr, pose, depth);
  ImageD color(intr.width, intr.height, 3, 0.0);
  if (!cloud.has_colors()) return color;
  for (std::size_t px = 0; px < winner.size(); ++px) {
    if (winner[px] < 0) continue;
    const Eigen::Vector3f& c = cloud.colors[static_cast<std::size_t>(winner[px])];
    for (int k = 0; k < 3; ++k) color.data()[px * 3 + k] = c[k];
  }
  return color;
}

DepthErrorReport depth_error(std::span<const ImageD> estimate, std::span<const ImageD> reference) {
  if (estimate.size() != reference.size()) throw ShapeMismatch("depth_error: frame counts differ");
  double sq = 0.0, rel = 0.0;
  std::size_t n = 0;
  for (std::size_t f = 0; f < estimate.size(); ++f) {
    if (!estimate[f].same_shape(reference[f])) throw ShapeMismatch("depth_error: frame dimensions differ");
    const auto a = estimate[f].data();
    const auto b = reference[f].data();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i], g = b[i];
      if (!std::isfinite(d) || !std::isfinite(g) || d <= 0.0 || g <= 0.0) continue;
      sq += (d - g) * (d - g);
      rel += std::abs(d - g) / g;
      ++n;
    }
  }
  if (n == 0) throw EmptyOverlap("depth_error: no pixel is valid in both depth sets");
  return {std::sqrt(sq / static_cast<double>(n)), rel / static_cast<double>(n), n};
}

namespace {

std::vector<ImageD> proxy_depths(const SceneLayout& layout, std::span<const CameraPose> poses, const Intrinsics& intr) {
  const ProxyScene scene(layout);
  std::vector<ImageD> out;
  for (const auto& pose : poses) out.push_back(std::move(*scene.render({intr, pose, kChannelDepth}).depth));
  return out;
}

}  // namespace

DepthErrorReport depth_alignment_report(const SceneLayout& layout, std::span<const ImageD> reconstruction,
                                        std::span<const CameraPose> poses, const Intrinsics& intr) {
  if (reconstruction.size() != poses.size()) throw ShapeMismatch("depth_alignment_report: one depth map per pose expected");
  return depth_error(reconstruction, proxy_depths(layout, poses, intr));
}

DepthErrorReport depth_alignment_report(const SceneLayout& layout, const PointCloud& cloud,
                                        std::span<const CameraPose> poses, const Intrinsics& intr) {
  std::vector<ImageD> recon;
  for (const auto& pose : poses) recon.push_back(rasterize_points(cloud, intr, pose));
  return depth_error(recon, proxy_depths(layout, poses, intr));
}

}  // namespace proxykit
