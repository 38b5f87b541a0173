#pragma once

#include "proxykit/image.hpp"
#include "proxykit/layout.hpp"
#include "proxykit/planner.hpp"
#include "proxykit/renderer.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace proxykit {

/// Produces depth maps (meters, +inf where undefined) for every pose of
/// `trajectory` after its motion has been mapped with camera scale `theta`.
/// Must be deterministic and return exactly one map per pose.
class NvsOracle {
 public:
  virtual ~NvsOracle() = default;
  virtual std::vector<ImageD> generate(double theta, const Trajectory& trajectory) const = 0;
  /// False declares the oracle serial; the search then never calls it concurrently.
  virtual bool concurrent_safe() const { return true; }
};

/// Metric reference depth for a trajectory, normally rendered from the proxy.
class DepthReference {
 public:
  virtual ~DepthReference() = default;
  virtual std::vector<ImageD> render(const Trajectory& trajectory) const = 0;
};

class ProxyDepthReference : public DepthReference {
 public:
  explicit ProxyDepthReference(const SceneLayout& layout) : scene_(std::make_shared<ProxyScene>(layout)) {}
  explicit ProxyDepthReference(std::shared_ptr<const ProxyScene> scene) : scene_(std::move(scene)) {}
  std::vector<ImageD> render(const Trajectory& trajectory) const override;

 private:
  std::shared_ptr<const ProxyScene> scene_;
};

/// Stand-in for a generative model: renders the proxy from poses whose
/// offsets from the trajectory centroid are scaled by theta / true_scale,
/// so the depth discrepancy vanishes at theta == true_scale.
class SyntheticOracle : public NvsOracle {
 public:
  SyntheticOracle(const SceneLayout& layout, double true_scale);
  SyntheticOracle(std::shared_ptr<const ProxyScene> scene, double true_scale);
  std::vector<ImageD> generate(double theta, const Trajectory& trajectory) const override;
  double true_scale() const { return true_scale_; }

 private:
  std::shared_ptr<const ProxyScene> scene_;
  double true_scale_;
};

/// Reads precomputed depth maps from `dir/theta_<%.4f>/depth_<%03d>.pfm`.
/// Throws OracleFailure when a requested theta or frame is missing.
class DirectoryReplayOracle : public NvsOracle {
 public:
  explicit DirectoryReplayOracle(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::vector<ImageD> generate(double theta, const Trajectory& trajectory) const override;
  static std::filesystem::path frame_path(const std::filesystem::path& dir, double theta, int frame);

 private:
  std::filesystem::path dir_;
};

struct ScheduleConfig {
  double theta_min = 0.1;  // initial search interval
  double theta_max = 2.0;
  double clamp_min = 0.1;  // global bounds applied to every candidate
  double clamp_max = 2.0;
  std::vector<double> resolutions = {1, 2, 4, 8, 16};
  int frames_evaluated = 8;
  int eval_size = 64;  // square render size per evaluated frame; 0 keeps the trajectory's

  void check() const;
};

struct SearchLevel {
  double resolution = 1.0;
  std::vector<double> candidates;  // ascending
  std::vector<double> losses;
  double selected = 0.0;
  double selected_loss = 0.0;
};

struct SearchTrace {
  std::vector<SearchLevel> levels;
  double theta_star = 0.0;
  double loss_star = 0.0;
  int evaluations = 0;  // distinct theta values queried

  std::string to_json() const;
};

/// Mean over frames of the per-frame mean absolute difference over pixels
/// finite and positive in both maps. Frames without shared pixels are skipped;
/// +inf when no frame has any. Throws ShapeMismatch.
double depth_alignment_loss(std::span<const ImageD> generated, std::span<const ImageD> reference);

/// Coarse-to-fine search over a scalar loss. The first level evaluates the
/// interval endpoints; level k evaluates best +- l / r_k around the best
/// theta seen so far, with l = theta_max - theta_min. Losses are memoized
/// and ties go to the smaller theta. `concurrent` allows new candidates of a
/// level to be evaluated in parallel.
SearchTrace coarse_to_fine_search(const std::function<double(double)>& loss, const ScheduleConfig& cfg,
                                  bool concurrent = false);

/// Indices of `count` equally spaced frames of an n-frame trajectory.
std::vector<int> evaluation_frames(int n_frames, int count);

/// Depth-guided camera-scale search. The oracle and reference both see the
/// evaluation subset of the trajectory at `eval_size`. OracleFailure
/// propagates with the failing theta.
SearchTrace bisection_search(const NvsOracle& oracle, const Trajectory& trajectory, const DepthReference& reference,
                             const ScheduleConfig& cfg);

/// Loss lookup for recorded searches; theta values are matched within 1e-9.
class ReplayLossTable {
 public:
  explicit ReplayLossTable(std::map<double, double> losses) : losses_(std::move(losses)) {}
  double operator()(double theta) const;

 private:
  std::map<double, double> losses_;
};

struct AlignmentReport {
  std::vector<double> translation_errors_m;
  std::vector<double> rotation_errors_deg;
  double translation_rmse = 0.0;
  double translation_median = 0.0;
  double rotation_rmse_deg = 0.0;
  double rotation_median_deg = 0.0;
};

/// Per-frame position distance and geodesic rotation angle. Throws LengthMismatch.
AlignmentReport verify_alignment(std::span<const CameraPose> target, std::span<const CameraPose> estimated);

double rmse(std::span<const double> values);
double median(std::vector<double> values);

}  // namespace proxykit
