#pragma once

#include "proxykit/image.hpp"
#include "proxykit/kdtree.hpp"
#include "proxykit/point_cloud.hpp"

#include <optional>
#include <span>
#include <vector>

namespace proxykit {

using Mask = Image<std::uint8_t>;  // values 0 or 1

/// Mean SSIM over pixels and channels: 11x11 Gaussian window (sigma 1.5),
/// zero padding, C1 = 0.01^2, C2 = 0.03^2 for a unit dynamic range.
double ssim(const ImageD& a, const ImageD& b);

/// (1 - lambda) * mean |a - b| + lambda * (1 - SSIM) / 2. Throws ShapeMismatch.
double loss_3dgs(const ImageD& image, const ImageD& rendered, double lambda = 0.2);

struct MaskedLoss {
  double value = 0.0;
  bool empty_mask = false;  // no pixel contributed; value is 0
};

/// Mean |rendered - reference| over pixels where the mask is 1 and both
/// depths are finite. Throws ShapeMismatch.
MaskedLoss masked_depth_loss(const ImageD& rendered, const ImageD& reference, const Mask& mask);

/// 1 on wall, floor and ceiling pixels; 0 on openings (windows, doors,
/// mirrors), objects and void.
Mask mask_from_semantics(const SemanticImage& semantic);

/// Caller-owned nearest-neighbor assignments, recomputed only when the
/// iteration counter enters a new block of `refresh_interval` iterations.
struct NnCache {
  std::size_t k = 1;
  long long refresh_interval = 1000;
  long long block = -1;
  std::vector<std::size_t> assignment;  // k entries per mean
  int refreshes = 0;

  bool stale(long long iteration, std::size_t n_means) const {
    return block != iteration / refresh_interval || assignment.size() != n_means * k;
  }
};

/// Mean over means of sqrt(||m - n||), n the assigned reference neighbor
/// (averaged over k neighbors when k > 1). Throws EmptyReference.
double nn_loss(std::span<const Vec3> means, const KdTree& reference, NnCache& cache, long long iteration = 0);

/// One-shot evaluation with a fresh tree and cache.
double nn_loss(std::span<const Vec3> means, const PointCloud& reference, std::size_t k = 1);

/// Gradient of nn_loss with respect to each mean under the cached
/// assignment; zero where a mean coincides with its neighbor.
std::vector<Vec3> nn_loss_gradient(std::span<const Vec3> means, const KdTree& reference, const NnCache& cache);

struct LossParts {
  double l_3dgs = 0.0;
  std::optional<double> l_geom;  // computed externally
  double l_nn = 0.0;
  double l_depth = 0.0;
};

struct TotalLoss {
  double value = 0.0;
  bool geom_missing = false;
};

/// Unweighted sum of the parts; a missing geometric term counts as 0 and is flagged.
TotalLoss total_loss(const LossParts& parts);

}  // namespace proxykit
