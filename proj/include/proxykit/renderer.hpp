#pragma once

#include "proxykit/camera.hpp"
#include "proxykit/cubemap.hpp"
#include "proxykit/image.hpp"
#include "proxykit/layout.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace proxykit {

enum RenderChannel : unsigned {
  kChannelDepth = 1u << 0,
  kChannelSemantic = 1u << 1,
  kChannelInstance = 1u << 2,
  kChannelNormal = 1u << 3,
};

struct RenderTarget {
  Intrinsics intrinsics;
  CameraPose pose;
  unsigned channels = kChannelDepth | kChannelSemantic;
};

/// Depth is the Euclidean distance along the view ray (not planar z), so
/// overlapping views of the same point agree. No-hit pixels hold +inf depth,
/// void semantics and instance 0.
struct RenderOutput {
  std::optional<ImageD> depth;
  std::optional<SemanticImage> semantic;
  std::optional<InstanceImage> instance;
  std::optional<ImageD> normal;  // 3 channels, world frame
};

struct CubemapRender {
  std::optional<Cubemap<double>> depth;
  std::optional<Cubemap<SemanticId>> semantic;
  std::optional<Cubemap<std::uint32_t>> instance;
  std::optional<Cubemap<double>> normal;
};

struct SurfaceHit {
  double t = kInf;
  Vec3 normal = Vec3::Zero();
  SemanticId semantic = label::kVoid;
  std::uint32_t instance = 0;
};

/// Exact ray caster over a layout: walls (cut by connectors and openings),
/// floor and ceiling slabs, object boxes and connector boxes, with a BVH
/// over all boxes. Immutable after construction; safe to share across threads.
class ProxyScene {
 public:
  struct BoxPrimitive {
    OrientedBox box;
    SemanticId semantic;
    std::uint32_t instance;
  };
  struct SlabPrimitive {
    Polygon2 outline;
    double z_top;
    double z_bottom;
    SemanticId semantic;
    std::uint32_t instance;
  };

  explicit ProxyScene(const SceneLayout& layout);

  SurfaceHit cast(const Vec3& origin, const Vec3& dir) const;
  RenderOutput render(const RenderTarget& target) const;
  CubemapRender render_cubemap(const CubemapRig& rig, int face_size, unsigned channels) const;

  /// Minimum finite depth of a square `probe_size` render with the given fov.
  double min_depth_probe(const CameraPose& pose, const Intrinsics& intr, int probe_size = 64) const;

  /// Distance from a point to the nearest surface in any direction.
  double nearest_surface_distance(const Vec3& p) const;

  /// True when every pixel of the full-resolution render has depth >=
  /// threshold. Skips rendering when the nearest surface is already far enough.
  bool clearance_at_least(const CameraPose& pose, const Intrinsics& intr, double threshold) const;

  const std::vector<BoxPrimitive>& boxes() const { return boxes_; }
  const std::vector<SlabPrimitive>& slabs() const { return slabs_; }

 private:
  struct Node {
    Eigen::AlignedBox3d bounds;
    int left = -1;  // internal: child indices; leaf: left == -1
    int right = -1;
    int first = 0;
    int count = 0;
  };
  int build(int begin, int end);

  std::vector<BoxPrimitive> boxes_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  std::vector<SlabPrimitive> slabs_;
};

RenderOutput render_view(const SceneLayout& layout, const RenderTarget& target);
CubemapRender render_cubemap(const SceneLayout& layout, const CubemapRig& rig, int face_size, unsigned channels);
double min_depth_probe(const SceneLayout& layout, const CameraPose& pose, const Intrinsics& intr, int probe_size = 64);

}  // namespace proxykit
