#include "proxykit/planner.hpp"

#include "proxykit/errors.hpp"
#include "proxykit/interpolation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace proxykit {

void PlannerConfig::check() const {
  if (n_quadrants != 4) throw DimensionError("planner: only 4 quadrants are supported");
  if (sparse_count < 2 || frames_per_traj < 2 || image_size < 1 || probe_size < 1 || max_retries < 0 ||
      panorama_views < 0)
    throw DimensionError("planner: counts must be positive");
  if (!(min_clearance_m > 0.0) || !(camera_height_m > 0.0) || !(radius_fraction > 0.0) ||
      !(fov_deg > 0.0 && fov_deg < 180.0) || !(retry_shrink > 0.0 && retry_shrink < 1.0))
    throw DimensionError("planner: parameters must be positive");
}

namespace {

Vec2 nudge_inside(const Vec2& q, const Polygon2& poly) {
  for (double step : {1e-3, 1e-2}) {
    for (int k = 0; k < 16; ++k) {
      const double a = 2.0 * kPi * k / 16;
      const Vec2 p = q + step * Vec2(std::cos(a), std::sin(a));
      if (point_in_polygon(p, poly)) return p;
    }
  }
  return q;
}

bool circle_fits(const Vec2& c, double r, const Polygon2& poly, const Eigen::AlignedBox2d& cell, double clearance) {
  constexpr int kSamples = 72;
  if (c.x() - r < cell.min().x() - 1e-9 || c.x() + r > cell.max().x() + 1e-9 ||
      c.y() - r < cell.min().y() - 1e-9 || c.y() + r > cell.max().y() + 1e-9)
    return false;
  for (int k = 0; k < kSamples; ++k) {
    const double a = 2.0 * kPi * k / kSamples;
    const Vec2 p = c + r * Vec2(std::cos(a), std::sin(a));
    if (!point_in_polygon(p, poly) || distance_to_boundary(p, poly) < clearance) return false;
  }
  return true;
}

}  // namespace

std::array<Quadrant, 4> partition_quadrants(const SceneLayout& layout, int room_id) {
  if (room_id < 0 || room_id >= static_cast<int>(layout.rooms.size()))
    throw UnknownId("room " + std::to_string(room_id) + " not in layout");
  const Polygon2& poly = layout.rooms[room_id].floor_polygon;
  Eigen::AlignedBox2d bb;
  for (const auto& v : poly) bb.extend(v);
  if (bb.sizes().minCoeff() < 1e-3) throw DegenerateRoom("room " + std::to_string(room_id) + " has near-zero extent");
  const Vec2 split = area_centroid(poly);

  std::array<Quadrant, 4> out;
  for (int q = 0; q < 4; ++q) {
    Quadrant& quad = out[q];
    quad.index = q;
    quad.room = room_id;
    const bool right = q == 0 || q == 3;
    const bool top = q < 2;
    // Quadrants ordered counter-clockwise from (+x, +y).
    quad.cell = Eigen::AlignedBox2d(Vec2(right ? split.x() : bb.min().x(), top ? split.y() : bb.min().y()),
                                    Vec2(right ? bb.max().x() : split.x(), top ? bb.max().y() : split.y()));
    Vec2 c = quad.cell.center();
    if (!point_in_polygon(c, poly)) c = nudge_inside(closest_boundary_point(c, poly), poly);
    quad.center = c;
  }
  return out;
}

bool pose_is_clear(const ProxyScene& scene, const CameraPose& pose, const PlannerConfig& cfg) {
  const Intrinsics intr = cfg.intrinsics();
  if (scene.min_depth_probe(pose, intr, cfg.probe_size) < cfg.min_clearance_m) return false;
  return scene.clearance_at_least(pose, intr, cfg.min_clearance_m);
}

SparseCircle plan_sparse_circle(const ProxyScene& scene, const Room& room, const Quadrant& quadrant,
                                const PlannerConfig& cfg, double radius_scale) {
  cfg.check();
  SparseCircle out;
  const Vec2 half = 0.5 * quadrant.cell.sizes();
  double r = cfg.radius_fraction * std::min(half.x(), half.y()) * radius_scale;
  int shrinks = 0;
  while (!circle_fits(quadrant.center, r, room.floor_polygon, quadrant.cell, cfg.min_clearance_m)) {
    r *= cfg.retry_shrink;
    if (++shrinks > 60 || r < 0.05)
      throw NoValidPoses("quadrant " + std::to_string(quadrant.index) + ": no collision-free circle fits");
  }
  out.radius = r;
  out.height = std::max(room.floor_z + cfg.min_clearance_m,
                        std::min(room.floor_z + cfg.camera_height_m, room.ceiling_z - cfg.min_clearance_m));
  const Vec3 target(quadrant.center.x(), quadrant.center.y(), out.height);
  bool any = false;
  for (int k = 0; k < cfg.sparse_count; ++k) {
    const double a = 2.0 * kPi * k / cfg.sparse_count;
    const Vec3 p(quadrant.center.x() + r * std::cos(a), quadrant.center.y() + r * std::sin(a), out.height);
    const CameraPose pose = look_at(p, target);
    const bool keep = pose_is_clear(scene, pose, cfg);
    any = any || keep;
    out.poses.push_back(pose);
    out.keep.push_back(keep);
  }
  if (!any) throw NoValidPoses("quadrant " + std::to_string(quadrant.index) + ": all sparse poses culled");
  return out;
}

Trajectory plan_trajectory(const ProxyScene& scene, const Room& room, const Quadrant& quadrant,
                           const PlannerConfig& cfg) {
  double scale = 1.0;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt, scale *= cfg.retry_shrink) {
    SparseCircle circle = plan_sparse_circle(scene, room, quadrant, cfg, scale);
    const int n = cfg.sparse_count;
    // Start right after the largest run of culled poses so that gap sits at
    // the seam of the open path instead of being bridged.
    int start = 0, best_gap = -1;
    for (int i = 0; i < n; ++i) {
      if (!circle.keep[i]) continue;
      int gap = 0;
      for (int j = 1; j <= n && !circle.keep[(i - j + n) % n]; ++j) ++gap;
      if (gap > best_gap) {
        best_gap = gap;
        start = i;
      }
    }
    std::vector<CameraPose> keys;
    for (int j = 0; j < n; ++j) {
      const int i = (start + j) % n;
      if (circle.keep[i]) keys.push_back(circle.poses[i]);
    }
    if (keys.size() < 2) throw NoValidPoses("quadrant " + std::to_string(quadrant.index) + ": fewer than 2 poses kept");

    std::vector<CameraPose> frames = interpolate_poses(keys, cfg.frames_per_traj);
    const bool clear = std::all_of(frames.begin(), frames.end(),
                                   [&](const CameraPose& p) { return pose_is_clear(scene, p, cfg); });
    if (!clear) continue;

    Trajectory t;
    t.poses = std::move(frames);
    t.intrinsics = cfg.intrinsics();
    t.kept_mask = circle.keep;
    t.quadrant_id = quadrant.index;
    t.radius = circle.radius;
    return t;
  }
  throw NoValidPoses("quadrant " + std::to_string(quadrant.index) + ": interpolated poses collide after " +
                     std::to_string(cfg.max_retries) + " retries");
}

std::vector<Trajectory> plan_room(const SceneLayout& layout, int room_id, const PlannerConfig& cfg) {
  const ProxyScene scene(layout);
  std::vector<Trajectory> out;
  for (const Quadrant& q : partition_quadrants(layout, room_id))
    out.push_back(plan_trajectory(scene, layout.rooms[room_id], q, cfg));
  return out;
}

std::vector<RenderTarget> initial_panorama_views(const Vec3& center, const PlannerConfig& cfg) {
  std::vector<RenderTarget> out;
  for (int k = 0; k < 8; ++k)
    out.push_back({cfg.intrinsics(), yaw_pitch_pose(center, deg2rad(45.0 * k), 0.0), kChannelDepth | kChannelSemantic});
  return out;
}

std::vector<RenderTarget> sample_panorama_training_views(const Vec3& center, int count, const PlannerConfig& cfg) {
  std::vector<RenderTarget> out;
  const double band = std::sin(deg2rad(cfg.max_pitch_deg));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = band * (1.0 - (2.0 * i + 1.0) / count);
    const double pitch = std::asin(z);
    const double yaw = std::fmod(golden * i, 2.0 * kPi);
    out.push_back({cfg.intrinsics(), yaw_pitch_pose(center, yaw, pitch), kChannelDepth | kChannelSemantic});
  }
  return out;
}

std::string trajectory_to_json(const Trajectory& traj) {
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.poses.size(); ++i) {
    const CameraPose& p = traj.poses[i];
    const Quat& q = p.rotation;
    frames.push_back({{"frame", i},
                      {"position", {round_sig9(p.position.x()), round_sig9(p.position.y()), round_sig9(p.position.z())}},
                      {"quaternion", {round_sig9(q.w()), round_sig9(q.x()), round_sig9(q.y()), round_sig9(q.z())}},
                      {"fov_deg", traj.intrinsics.fov_deg},
                      {"width", traj.intrinsics.width},
                      {"height", traj.intrinsics.height}});
  }
  return frames.dump(2) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed trajectory JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ParseError("trajectory: expected a non-empty array of frames");
  Trajectory t;
  try {
    for (const auto& f : j) {
      const auto& p = f.at("position");
      const auto& q = f.at("quaternion");
      t.poses.emplace_back(Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), q.at(3).get<double>()),
                           Vec3(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()));
      t.intrinsics = {f.at("width").get<int>(), f.at("height").get<int>(), f.at("fov_deg").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trajectory schema mismatch: ") + e.what());
  }
  t.intrinsics.check();
  return t;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << trajectory_to_json(traj);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return trajectory_from_json(ss.str());
}

}  // namespace proxykit
