#pragma once

#include "proxykit/camera.hpp"

#include <span>
#include <vector>

namespace proxykit {

struct InterpolationOptions {
  /// Meters of path length equivalent to one radian of rotation when
  /// distributing output frames over segments.
  double rotation_length_scale = 1.0;
};

/// Smooth pose sequence of `n_out` frames through every key: centripetal
/// Catmull-Rom positions, shortest-arc slerp rotations, frames distributed
/// over segments in proportion to segment length. Throws DegenerateInput
/// for fewer than two keys, n_out < keys, or coincident consecutive keys.
std::vector<CameraPose> interpolate_poses(std::span<const CameraPose> keys, int n_out,
                                          const InterpolationOptions& opts = {});

/// Number of interior frames assigned to each of the keys.size()-1 segments.
std::vector<int> allocate_segment_frames(std::span<const double> weights, int extra);

}  // namespace proxykit
