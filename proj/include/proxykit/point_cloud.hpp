#pragma once

#include "proxykit/geometry.hpp"
#include "proxykit/semantics.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace proxykit {

/// World-frame points with optional per-point attributes. Attribute vectors
/// are either empty (absent) or hold exactly size() entries.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Eigen::Vector3f> colors;  // [0,1]
  std::vector<SemanticId> semantic;
  std::vector<std::uint32_t> instance;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_colors() const { return !colors.empty(); }
  bool has_semantic() const { return !semantic.empty(); }
  bool has_instance() const { return !instance.empty(); }

  /// Throws ShapeMismatch if an attribute length disagrees with size(), or
  /// DimensionError on non-finite positions.
  void check() const;

  /// Appends `other`; attributes missing on one side are zero-filled.
  void append(const PointCloud& other);
  PointCloud select(const std::vector<std::size_t>& indices) const;
};

/// Binary little-endian PLY with properties
/// x,y,z (float32), red,green,blue (uint8), semantic (uint16), instance (uint32).
void write_ply(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_ply(const std::filesystem::path& path);

}  // namespace proxykit
