#pragma once

#include "proxykit/camera.hpp"
#include "proxykit/layout.hpp"
#include "proxykit/renderer.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace proxykit {

struct PlannerConfig {
  int n_quadrants = 4;
  int sparse_count = 12;
  double min_clearance_m = 0.3;
  int frames_per_traj = 42;
  double camera_height_m = 1.5;
  double radius_fraction = 0.4;  // of the smaller quadrant half-extent
  double fov_deg = 72.0;
  int image_size = 576;
  int probe_size = 64;
  int max_retries = 5;
  double retry_shrink = 0.9;
  int panorama_views = 170;
  double max_pitch_deg = 60.0;

  Intrinsics intrinsics() const { return {image_size, image_size, fov_deg}; }
  void check() const;
};

struct Quadrant {
  int index = 0;
  int room = 0;
  Eigen::AlignedBox2d cell;
  Vec2 center = Vec2::Zero();
};

/// Poses of one quadrant's circular pattern and their collision verdicts.
struct SparseCircle {
  double radius = 0.0;
  double height = 0.0;
  std::vector<CameraPose> poses;
  std::vector<bool> keep;
};

struct Trajectory {
  std::vector<CameraPose> poses;
  Intrinsics intrinsics;
  std::vector<bool> kept_mask;  // over the sparse pattern
  int quadrant_id = 0;
  double radius = 0.0;

  int frame_count() const { return static_cast<int>(poses.size()); }
};

/// Splits the room's floor-polygon bounding box at the polygon's area
/// centroid. Cell centers outside the polygon move to the nearest interior point.
/// Throws DegenerateRoom for near-zero extent.
std::array<Quadrant, 4> partition_quadrants(const SceneLayout& layout, int room_id);

/// Collision verdict used for every emitted pose: the low-resolution probe
/// and the full-resolution render must both stay at or beyond the clearance.
bool pose_is_clear(const ProxyScene& scene, const CameraPose& pose, const PlannerConfig& cfg);

/// Circle of `sparse_count` poses around the quadrant center at eye height,
/// each looking at the center. `radius_scale` shrinks the nominal radius.
/// Throws NoValidPoses when no pose survives.
SparseCircle plan_sparse_circle(const ProxyScene& scene, const Room& room, const Quadrant& quadrant,
                                const PlannerConfig& cfg, double radius_scale = 1.0);

/// Interpolates the kept sparse poses to `frames_per_traj` frames; retries
/// with a smaller circle when an interpolated frame fails the collision test.
Trajectory plan_trajectory(const ProxyScene& scene, const Room& room, const Quadrant& quadrant,
                           const PlannerConfig& cfg);

/// Convenience: all quadrant trajectories of a room.
std::vector<Trajectory> plan_room(const SceneLayout& layout, int room_id, const PlannerConfig& cfg);

/// Eight views at `center`, yaw 0..315 degrees in 45 degree steps, level.
std::vector<RenderTarget> initial_panorama_views(const Vec3& center, const PlannerConfig& cfg);

/// Fibonacci-lattice viewing directions restricted to |pitch| <= max_pitch.
std::vector<RenderTarget> sample_panorama_training_views(const Vec3& center, int count, const PlannerConfig& cfg);

std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& text);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace proxykit
