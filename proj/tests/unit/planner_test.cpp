#include "proxykit/generator.hpp"
#include "proxykit/planner.hpp"
#include "proxykit/polygon.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace proxykit;
using namespace testing_support;

namespace {

/// Nearest boundary point by dense sampling of every edge.
Vec2 sampled_nearest_boundary(const Vec2& p, const Polygon2& poly) {
  Vec2 best = poly[0];
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    for (int k = 0; k <= 20000; ++k) {
      const Vec2 q = a + (b - a) * (k / 20000.0);
      if ((q - p).norm() < (best - p).norm()) best = q;
    }
  }
  return best;
}

}  // namespace

TEST(Quadrants, SquareRoomCentersAtPlusMinusOne) {
  const SceneLayout l = empty_room(4.0, 4.0);
  const auto q = partition_quadrants(l, 0);
  const Vec2 expected[4] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(q[i].index, i);
    EXPECT_NEAR((q[i].center - expected[i]).norm(), 0.0, 1e-12);
    EXPECT_NEAR(q[i].cell.volume(), 4.0, 1e-12);
  }
}

TEST(Quadrants, LShapedCellCenterProjectedInside) {
  SceneLayout l;
  l.id = "ell";
  Room r;
  r.floor_polygon = {{0, 0}, {5, 0}, {5, 2}, {2, 2}, {2, 4}, {0, 4}};
  l.rooms.push_back(r);
  const auto q = partition_quadrants(l, 0);
  // Area centroid of the union of [0,5]x[0,2] and [0,2]x[2,4].
  const Vec2 split((10 * 2.5 + 4 * 1.0) / 14.0, (10 * 1.0 + 4 * 3.0) / 14.0);
  EXPECT_NEAR(q[0].cell.min().x(), split.x(), 1e-12);
  EXPECT_NEAR(q[0].cell.min().y(), split.y(), 1e-12);
  const Vec2 raw = q[0].cell.center();
  ASSERT_FALSE(point_in_polygon(raw, r.floor_polygon));
  const Vec2 nearest = sampled_nearest_boundary(raw, r.floor_polygon);
  EXPECT_NEAR((q[0].center - nearest).norm(), 0.0, 2e-3);
  EXPECT_TRUE(point_in_polygon(q[0].center, r.floor_polygon));
  // Cells whose center already lies inside are untouched.
  for (int i = 1; i < 4; ++i) EXPECT_NEAR((q[i].center - q[i].cell.center()).norm(), 0.0, 1e-12);
}

TEST(Quadrants, Errors) {
  SceneLayout l;
  Room r;
  r.floor_polygon = {{0, 0}, {4, 0}, {4, 1e-5}, {0, 1e-5}};
  l.rooms.push_back(r);
  EXPECT_THROW(partition_quadrants(l, 0), DegenerateRoom);
  EXPECT_THROW(partition_quadrants(l, 3), UnknownId);
}

TEST(PlannerConfig, RejectsInvalidValues) {
  PlannerConfig cfg;
  EXPECT_NO_THROW(cfg.check());
  cfg.min_clearance_m = 0.0;
  EXPECT_THROW(cfg.check(), DimensionError);
  cfg = {};
  cfg.n_quadrants = 3;
  EXPECT_THROW(cfg.check(), DimensionError);
  cfg = {};
  cfg.frames_per_traj = 0;
  EXPECT_THROW(cfg.check(), DimensionError);
}

TEST(SparseCircle, EmptyRoomKeepsAllPosesOnCircle) {
  const SceneLayout l = empty_room(6.0, 6.0);
  const ProxyScene scene(l);
  const PlannerConfig cfg;
  const auto quads = partition_quadrants(l, 0);
  for (const Quadrant& q : quads) {
    const SparseCircle c = plan_sparse_circle(scene, l.rooms[0], q, cfg);
    ASSERT_EQ(c.poses.size(), 12u);
    EXPECT_NEAR(c.radius, 0.4 * 1.5, 1e-12);
    EXPECT_NEAR(c.height, 1.5, 1e-12);
    for (std::size_t i = 0; i < c.poses.size(); ++i) {
      EXPECT_TRUE(c.keep[i]);
      const Vec3& p = c.poses[i].position;
      EXPECT_NEAR((p.head<2>() - q.center).norm(), c.radius, 1e-12);
      EXPECT_TRUE(q.cell.contains(p.head<2>()));
      const Vec3 to_center = (Vec3(q.center.x(), q.center.y(), c.height) - p).normalized();
      EXPECT_NEAR((c.poses[i].forward() - to_center).norm(), 0.0, 1e-9);
    }
  }
}

TEST(SparseCircle, RadiusShrinksToKeepWallClearance) {
  // Narrow room: the nominal radius would bring the circle within 0.3 m of a wall.
  SceneLayout l;
  l.id = "narrow";
  l.rooms.push_back(box_room(0.0, 0.0, 8.0, 2.0));
  const ProxyScene scene(l);
  const PlannerConfig cfg;
  for (const Quadrant& q : partition_quadrants(l, 0)) {
    const SparseCircle c = plan_sparse_circle(scene, l.rooms[0], q, cfg);
    for (const auto& pose : c.poses) {
      EXPECT_GE(distance_to_boundary(pose.position.head<2>(), l.rooms[0].floor_polygon), 0.3 - 1e-9);
      EXPECT_TRUE(q.cell.contains(pose.position.head<2>()));
    }
  }
}

TEST(SparseCircle, ObstacleCullsExactlyTheFacingPoses) {
  SceneLayout l = empty_room(6.0, 6.0);
  // A wardrobe inside quadrant 0's circle, offset toward angle 0.
  l.objects.push_back(make_object(1, label::kCabinet, Vec3(1.85, 1.5, 1.0), Vec3(0.3, 0.3, 2.0)));
  const ProxyScene scene(l);
  PlannerConfig cfg;
  const Quadrant q = partition_quadrants(l, 0)[0];
  const SparseCircle c = plan_sparse_circle(scene, l.rooms[0], q, cfg);
  const Intrinsics hi{512, 512, cfg.fov_deg};
  int culled = 0, kept = 0, decided = 0;
  for (std::size_t i = 0; i < c.poses.size(); ++i) {
    const double oracle = full_render_min_depth(scene, c.poses[i], hi);
    culled += !c.keep[i];
    kept += c.keep[i];
    // Skip poses whose minimum depth is within one pixel footprint of the threshold.
    if (std::abs(oracle - cfg.min_clearance_m) < 0.005) continue;
    ++decided;
    EXPECT_EQ(c.keep[i], oracle >= cfg.min_clearance_m) << "pose " << i << " oracle " << oracle;
  }
  EXPECT_GT(culled, 0);
  EXPECT_GT(kept, 0);
  EXPECT_GE(decided, 10);
}

TEST(SparseCircle, AllCulledThrows) {
  SceneLayout l = empty_room(6.0, 6.0);
  l.objects.push_back(make_object(1, label::kCabinet, Vec3(1.5, 1.5, 1.0), Vec3(1.0, 1.0, 2.0)));
  const ProxyScene scene(l);
  const Quadrant q = partition_quadrants(l, 0)[0];
  EXPECT_THROW(plan_sparse_circle(scene, l.rooms[0], q, PlannerConfig{}), NoValidPoses);
}

TEST(Trajectory, EmptyRoomFortyTwoClearFrames) {
  const SceneLayout l = empty_room(6.0, 6.0);
  const ProxyScene scene(l);
  const PlannerConfig cfg;
  const auto trajs = plan_room(l, 0, cfg);
  ASSERT_EQ(trajs.size(), 4u);
  int total = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Trajectory& t = trajs[i];
    EXPECT_EQ(t.frame_count(), 42);
    EXPECT_EQ(t.quadrant_id, static_cast<int>(i));
    EXPECT_EQ(t.intrinsics, cfg.intrinsics());
    for (int k = 0; k < t.frame_count(); k += 7)
      EXPECT_GE(full_render_min_depth(scene, t.poses[k], t.intrinsics), 0.3);
    for (const auto& p : t.poses) EXPECT_TRUE(full_resolution_clear(scene, p, t.intrinsics, 0.3));
    total += t.frame_count();
  }
  EXPECT_EQ(total, 168);
}

TEST(Trajectory, CulledGapIsNotBridged) {
  SceneLayout l = empty_room(6.0, 6.0);
  l.objects.push_back(make_object(1, label::kCabinet, Vec3(1.85, 1.5, 1.0), Vec3(0.3, 0.3, 2.0)));
  const ProxyScene scene(l);
  const PlannerConfig cfg;
  const Quadrant q = partition_quadrants(l, 0)[0];
  const Trajectory t = plan_trajectory(scene, l.rooms[0], q, cfg);
  ASSERT_EQ(t.frame_count(), 42);
  for (const auto& p : t.poses) EXPECT_TRUE(pose_is_clear(scene, p, cfg));
  // The path starts and ends at kept sparse poses.
  const SparseCircle c = plan_sparse_circle(scene, l.rooms[0], q, cfg);
  auto is_kept_sparse = [&](const CameraPose& p) {
    for (std::size_t i = 0; i < c.poses.size(); ++i)
      if (c.keep[i] && (c.poses[i].position - p.position).norm() < 1e-9) return true;
    return false;
  };
  EXPECT_TRUE(is_kept_sparse(t.poses.front()));
  EXPECT_TRUE(is_kept_sparse(t.poses.back()));
}

TEST(Trajectory, GeneratedLayoutsFullResolutionSafety) {
  const PlannerConfig cfg;
  for (std::uint64_t seed : {2u, 17u, 42u, 77u, 99u}) {
    const SceneLayout l = generate_layout(seed);
    const ProxyScene scene(l);
    for (const Trajectory& t : plan_room(l, 0, cfg))
      for (const auto& p : t.poses) EXPECT_TRUE(full_resolution_clear(scene, p, t.intrinsics, 0.3)) << "seed " << seed;
  }
}

TEST(Trajectory, CoverageOfReferenceRoomFloor) {
  // Reference room: the 5 x 4 m footprint of the living-room fixture, unfurnished.
  const SceneLayout l = empty_room(5.0, 4.0);
  const auto trajs = plan_room(l, 0, PlannerConfig{});
  int seen = 0, total = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec3 p(-2.5 + 5.0 * (i + 0.5) / n, -2.0 + 4.0 * (j + 0.5) / n, 0.0);
      ++total;
      bool hit = false;
      for (const auto& t : trajs) {
        for (const auto& pose : t.poses) {
          const auto uv = project(t.intrinsics, pose, p);
          if (uv && uv->x() >= 0 && uv->y() >= 0 && uv->x() < t.intrinsics.width && uv->y() < t.intrinsics.height) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      seen += hit;
    }
  const double coverage = static_cast<double>(seen) / total;
  RecordProperty("coverage", std::to_string(coverage));
  EXPECT_GE(coverage, 0.95);
}

TEST(Trajectory, DeterministicAndJsonRoundTrip) {
  const SceneLayout l = load_layout(data_path("fixtures/living_room.json"));
  const auto a = plan_room(l, 0, PlannerConfig{});
  const auto b = plan_room(l, 0, PlannerConfig{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(trajectory_to_json(a[i]), trajectory_to_json(b[i]));

  const auto dir = temp_dir("planner_json");
  save_trajectory(a[0], dir / "t.json");
  const Trajectory back = load_trajectory(dir / "t.json");
  ASSERT_EQ(back.frame_count(), a[0].frame_count());
  EXPECT_EQ(back.intrinsics, a[0].intrinsics);
  for (int i = 0; i < back.frame_count(); ++i) {
    // Files carry 9 significant digits.
    EXPECT_NEAR((back.poses[i].position - a[0].poses[i].position).norm(), 0.0, 1e-8);
    EXPECT_LT(rotation_angle_between(back.poses[i].rotation, a[0].poses[i].rotation), 1e-8);
  }
  EXPECT_THROW(trajectory_from_json("{\"frames\": 3}"), ParseError);
  EXPECT_THROW(trajectory_from_json("not json"), ParseError);
}

TEST(Panorama, InitialEightViews) {
  const PlannerConfig cfg;
  const Vec3 c(0.5, -0.2, 1.5);
  const auto views = initial_panorama_views(c, cfg);
  ASSERT_EQ(views.size(), 8u);
  for (int k = 0; k < 8; ++k) {
    const Vec3 f = views[k].pose.forward();
    EXPECT_NEAR(std::atan2(f.y(), f.x()), std::remainder(kPi / 4 * k, 2 * kPi), 1e-12);
    EXPECT_NEAR(f.z(), 0.0, 1e-12);
    EXPECT_NEAR(views[k].pose.left().z(), 0.0, 1e-12);
    EXPECT_EQ(views[k].pose.position, c);
    EXPECT_EQ(views[k].intrinsics, (Intrinsics{576, 576, 72.0}));
  }
  EXPECT_NEAR((views[0].pose.forward() - Vec3::UnitX()).norm(), 0.0, 1e-12);
  EXPECT_LT(45.0, cfg.fov_deg);  // adjacent views overlap
}

TEST(Panorama, TrainingViewsFibonacciLattice) {
  const PlannerConfig cfg;
  const auto views = sample_panorama_training_views(Vec3(0, 0, 1.5), 170, cfg);
  ASSERT_EQ(views.size(), 170u);
  EXPECT_EQ(static_cast<int>(views.size()) + 4 * cfg.frames_per_traj, 338);
  std::vector<Vec3> dirs;
  for (const auto& v : views) {
    const Vec3 f = v.pose.forward();
    EXPECT_LE(std::abs(std::asin(f.z())), deg2rad(60.0) + 1e-12);
    EXPECT_NEAR(v.pose.left().z(), 0.0, 1e-12);  // zero roll
    dirs.push_back(f);
  }
  double min_angle = kInf;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = i + 1; j < dirs.size(); ++j)
      min_angle = std::min(min_angle, std::acos(std::clamp(dirs[i].dot(dirs[j]), -1.0, 1.0)));
  // Ideal spacing: side of the square cell that tiles the |pitch| <= 60 band with 170 points.
  const double band_area = 4.0 * kPi * std::sin(deg2rad(60.0));
  const double ideal = std::sqrt(band_area / 170.0);
  EXPECT_GT(min_angle, 0.7 * ideal);

  const auto single = sample_panorama_training_views(Vec3(0, 0, 1.5), 1, cfg);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_NEAR((single[0].pose.forward() - Vec3::UnitX()).norm(), 0.0, 1e-12);

  // Pure function of its inputs.
  const auto again = sample_panorama_training_views(Vec3(0, 0, 1.5), 170, cfg);
  for (std::size_t i = 0; i < views.size(); ++i) EXPECT_EQ(views[i].pose.rotation.coeffs(), again[i].pose.rotation.coeffs());
}
