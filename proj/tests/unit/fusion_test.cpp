#include "proxykit/fusion.hpp"
#include "proxykit/parallel.hpp"
#include "proxykit/renderer.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <tuple>

using namespace proxykit;
using namespace testing_support;

namespace {

const SceneLayout& fixture() {
  static const SceneLayout l = load_layout(data_path("fixtures/living_room.json"));
  return l;
}

DepthFrame render_frame(const ProxyScene& scene, const CameraPose& pose, const Intrinsics& intr) {
  const RenderOutput out = scene.render({intr, pose, kChannelDepth | kChannelSemantic | kChannelInstance});
  DepthFrame f;
  f.depth = *out.depth;
  f.semantic = out.semantic;
  f.instance = out.instance;
  f.intrinsics = intr;
  f.pose = pose;
  return f;
}

/// Pixels whose 4-neighbourhood stays on one smooth surface: every neighbour
/// valid and within 2% depth of the center.
bool interior_pixel(const ImageD& d, int x, int y) {
  if (x == 0 || y == 0 || x + 1 == d.width() || y + 1 == d.height()) return false;
  const double c = d.at(x, y);
  for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
    const double n = d.at(x + dx, y + dy);
    if (!std::isfinite(n) || std::abs(n - c) > 0.02 * c) return false;
  }
  return true;
}

}  // namespace

TEST(Backproject, SinglePixelOnAxis) {
  DepthFrame f;
  f.depth = ImageD(1, 1, 1, 2.0);
  f.intrinsics = {1, 1, 90.0};
  const PointCloud c = backproject(f);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR((c.positions[0] - Vec3(2, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(Backproject, InvalidPixelsSkippedAndStride) {
  DepthFrame f;
  f.depth = ImageD(8, 6, 1, 1.0);
  f.depth.at(0, 0) = kInf;
  f.depth.at(2, 0) = 0.0;
  f.depth.at(4, 0) = std::nan("");
  f.intrinsics = {8, 6, 60.0};
  EXPECT_EQ(backproject(f).size(), 48u - 3u);
  EXPECT_EQ(backproject(f, 2).size(), 12u - 3u);
}

TEST(Backproject, AuxShapeMismatch) {
  DepthFrame f;
  f.depth = ImageD(8, 6, 1, 1.0);
  f.intrinsics = {8, 6, 60.0};
  f.semantic = SemanticImage(6, 8);
  EXPECT_THROW(backproject(f), ShapeMismatch);
  f.semantic.reset();
  f.color = ImageD(8, 6, 1);
  EXPECT_THROW(backproject(f), ShapeMismatch);
  f.color.reset();
  f.intrinsics = {7, 6, 60.0};
  EXPECT_THROW(backproject(f), ShapeMismatch);
}

TEST(Backproject, RenderedWallIsPlanar) {
  const SceneLayout l = empty_room(4.0, 4.0, 2.8);
  const ProxyScene scene(l);
  const DepthFrame f = render_frame(scene, CameraPose(Quat::Identity(), Vec3(0.3, 0.2, 1.4)), {96, 96, 72.0});
  const PointCloud c = backproject(f);
  int wall_points = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.semantic[i] != label::kWall) continue;
    ++wall_points;
    EXPECT_LT(std::abs(c.positions[i].x() - 2.0), 1e-6);
  }
  EXPECT_GT(wall_points, 5000);
}

TEST(Backproject, FixtureCubemapInsideRoomBounds) {
  const ProxyScene scene(fixture());
  const CubemapRig rig{Vec3(0.0, 0.0, 1.5), 0.0, 90.0};
  const int n = 128;
  const CubemapRender cube = scene.render_cubemap(rig, n, kChannelDepth);
  Eigen::AlignedBox3d room;
  for (const Vec2& v : fixture().rooms[0].floor_polygon) room.extend(Vec3(v.x(), v.y(), fixture().rooms[0].floor_z));
  room.extend(Vec3(room.min().x(), room.min().y(), fixture().rooms[0].ceiling_z));
  room.min().array() -= 1e-3;
  room.max().array() += 1e-3;
  std::size_t total = 0;
  for (int face = 0; face < kCubeFaces; ++face) {
    DepthFrame f;
    f.depth = cube.depth->faces[face];
    f.intrinsics = rig.face_intrinsics(n);
    f.pose = rig.face_pose(face);
    const PointCloud c = backproject(f, 4);
    for (const Vec3& p : c.positions) EXPECT_TRUE(room.contains(p)) << p.transpose();
    total += c.size();
  }
  EXPECT_EQ(total, 6u * 32u * 32u);
}

TEST(Fuse, IdenticalFramesIdempotent) {
  const ProxyScene scene(fixture());
  const DepthFrame f = render_frame(scene, yaw_pitch_pose(Vec3(0.5, 0.5, 1.5), 0.7, -0.2), {64, 64, 72.0});
  const std::vector<DepthFrame> one{f}, two{f, f};
  const PointCloud a = fuse_frames(one, 1, 0.01);
  const PointCloud b = fuse_frames(two, 1, 0.01);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR((a.positions[i] - b.positions[i]).norm(), 0.0, 1e-12);
    EXPECT_EQ(a.semantic[i], b.semantic[i]);
    EXPECT_EQ(a.instance[i], b.instance[i]);
  }
}

TEST(Fuse, ZeroVoxelIsConcatenation) {
  const ProxyScene scene(fixture());
  std::vector<DepthFrame> frames;
  for (int k = 0; k < 3; ++k) frames.push_back(render_frame(scene, yaw_pitch_pose(Vec3(0, 0, 1.5), k * 2.0, 0.0), {32, 32, 72.0}));
  const PointCloud fused = fuse_frames(frames, 1, 0.0);
  PointCloud concat;
  for (const auto& f : frames) concat.append(backproject(f));
  ASSERT_EQ(fused.size(), concat.size());
  for (std::size_t i = 0; i < fused.size(); ++i) EXPECT_EQ(fused.positions[i], concat.positions[i]);
  EXPECT_EQ(fused.semantic, concat.semantic);
}

TEST(Fuse, RigidEquivariance) {
  const ProxyScene scene(fixture());
  std::vector<DepthFrame> frames;
  for (int k = 0; k < 4; ++k)
    frames.push_back(render_frame(scene, yaw_pitch_pose(Vec3(0.2 * k, -0.1, 1.5), k * 1.5, 0.1), {48, 48, 72.0}));
  std::mt19937_64 rng(9);
  const Quat r = random_rotation(rng);
  const Vec3 t(1.5, -2.0, 0.7);
  std::vector<DepthFrame> moved = frames;
  for (auto& f : moved) f.pose = CameraPose(r * f.pose.rotation, r * f.pose.position + t);
  const PointCloud a = fuse_frames(frames, 1, 0.0);
  const PointCloud b = fuse_frames(moved, 1, 0.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR((b.positions[i] - (r * a.positions[i] + t)).norm(), 0.0, 1e-9);
}

TEST(Fuse, VoxelDedupBound) {
  const ProxyScene scene(fixture());
  std::vector<DepthFrame> frames;
  for (int k = 0; k < 6; ++k) frames.push_back(render_frame(scene, yaw_pitch_pose(Vec3(0, 0, 1.5), k, 0.0), {96, 96, 72.0}));
  const double voxel = 0.05;
  std::size_t input = 0;
  std::set<std::tuple<long, long, long>> cells;
  for (const auto& f : frames) {
    const PointCloud pts = backproject(f);
    input += pts.size();
    for (const Vec3& p : pts.positions) {
      const Eigen::Vector3d k = (p / voxel).array().floor();
      cells.emplace(long(k.x()), long(k.y()), long(k.z()));
    }
  }
  const PointCloud c = fuse_frames(frames, 1, voxel);
  Eigen::AlignedBox3d bb;
  for (const Vec3& p : c.positions) bb.extend(p);
  EXPECT_LE(c.size(), input);
  EXPECT_LT(c.size(), input / 2);
  EXPECT_LE(static_cast<double>(c.size()), (bb.sizes().array() / voxel + 1.0).prod());
  // Exactly one output point per occupied voxel.
  EXPECT_EQ(c.size(), cells.size());
}

TEST(Fuse, MajorityLabelsAndMeanColor) {
  PointCloud c;
  c.positions = {Vec3(0.001, 0.001, 0.001), Vec3(0.002, 0.002, 0.002), Vec3(0.003, 0.003, 0.003),
                 Vec3(0.5, 0.5, 0.5), Vec3(0.501, 0.5, 0.5)};
  c.semantic = {5, 3, 3, 7, 4};
  c.instance = {9, 9, 2, 1, 1};
  c.colors = {Eigen::Vector3f(1, 0, 0), Eigen::Vector3f(0, 1, 0), Eigen::Vector3f(0, 0, 1), Eigen::Vector3f(1, 1, 1),
              Eigen::Vector3f(0, 0, 0)};
  const PointCloud d = voxel_downsample(c, 0.01);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR((d.positions[0] - Vec3(0.002, 0.002, 0.002)).norm(), 0.0, 1e-15);
  EXPECT_EQ(d.semantic[0], 3);
  EXPECT_EQ(d.instance[0], 9u);
  EXPECT_NEAR((d.colors[0] - Eigen::Vector3f(1, 1, 1) / 3.0f).norm(), 0.0, 1e-6);
  EXPECT_EQ(d.semantic[1], 4);  // tie between 7 and 4 goes to the lower id
  EXPECT_EQ(d.instance[1], 1u);
  EXPECT_EQ(voxel_downsample(c, 0.0).size(), c.size());
}

TEST(Fuse, DeterministicAcrossThreadCounts) {
  const ProxyScene scene(fixture());
  std::vector<DepthFrame> frames;
  for (int k = 0; k < 8; ++k) frames.push_back(render_frame(scene, yaw_pitch_pose(Vec3(0, 0.3, 1.5), k * 0.8, 0.0), {48, 48, 72.0}));
  const unsigned before = thread_limit();
  set_thread_limit(1);
  const PointCloud a = fuse_frames(frames, 1, 0.01);
  set_thread_limit(6);
  const PointCloud b = fuse_frames(frames, 1, 0.01);
  set_thread_limit(before);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_EQ(a.semantic, b.semantic);
}

TEST(Fuse, RenderBackprojectRerenderRoundTrip) {
  const ProxyScene scene(fixture());
  const Intrinsics intr{160, 160, 72.0};
  std::size_t ok = 0, checked = 0;
  for (int k = 0; k < 4; ++k) {
    const CameraPose pose = yaw_pitch_pose(Vec3(-0.4 + 0.3 * k, 0.2, 1.5), 0.5 + 1.6 * k, -0.15);
    const DepthFrame f = render_frame(scene, pose, intr);
    const ImageD back = rasterize_points(backproject(f), intr, pose);
    for (int y = 0; y < intr.height; ++y)
      for (int x = 0; x < intr.width; ++x) {
        if (!std::isfinite(f.depth.at(x, y)) || !interior_pixel(f.depth, x, y)) continue;
        ++checked;
        ok += std::abs(back.at(x, y) - f.depth.at(x, y)) <= 1e-4;
      }
  }
  ASSERT_GT(checked, 80000u);
  EXPECT_GE(static_cast<double>(ok) / checked, 0.999);
}

TEST(Rasterize, NearestPointWinsAndColorsFollow) {
  PointCloud c;
  c.positions = {Vec3(3, 0, 0), Vec3(2, 0, 0), Vec3(-1, 0, 0)};
  c.colors = {Eigen::Vector3f(1, 0, 0), Eigen::Vector3f(0, 1, 0), Eigen::Vector3f(0, 0, 1)};
  const Intrinsics intr{3, 3, 60.0};
  const ImageD d = rasterize_points(c, intr, CameraPose());
  EXPECT_EQ(d.at(1, 1), 2.0);
  EXPECT_TRUE(std::isinf(d.at(0, 0)));
  const ImageD col = rasterize_point_colors(c, intr, CameraPose());
  EXPECT_EQ(col.at(1, 1, 1), 1.0);
  EXPECT_EQ(col.at(1, 1, 0), 0.0);
}

TEST(DepthError, IdentityScaledAndErrors) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  std::vector<ImageD> gt;
  for (int f = 0; f < 3; ++f) {
    ImageD img(20, 10);
    for (double& v : img.data()) v = u(rng);
    img.at(0, 0) = kInf;
    gt.push_back(img);
  }
  const DepthErrorReport same = depth_error(gt, gt);
  EXPECT_EQ(same.rmse_m, 0.0);
  EXPECT_EQ(same.abs_rel, 0.0);
  EXPECT_EQ(same.pixels, 3u * 199u);
  std::vector<ImageD> scaled = gt;
  for (auto& img : scaled)
    for (double& v : img.data()) v *= 1.1;
  EXPECT_NEAR(depth_error(scaled, gt).abs_rel, 0.1, 1e-9);
  const std::vector<ImageD> empty{ImageD(20, 10, 1, kInf)};
  EXPECT_THROW(depth_error(empty, std::span<const ImageD>(gt).first(1)), EmptyOverlap);
  const std::vector<ImageD> small{ImageD(2, 2, 1, 1.0)};
  EXPECT_THROW(depth_error(small, std::span<const ImageD>(gt).first(1)), ShapeMismatch);
}

TEST(DepthError, ProxyReportOnRenderedDepths) {
  const ProxyScene scene(fixture());
  const Intrinsics intr{64, 64, 72.0};
  std::vector<CameraPose> poses;
  std::vector<ImageD> depths;
  for (int k = 0; k < 3; ++k) {
    poses.push_back(yaw_pitch_pose(Vec3(0.1 * k, 0, 1.5), 2.0 * k, 0.0));
    depths.push_back(*scene.render({intr, poses.back(), kChannelDepth}).depth);
  }
  const DepthErrorReport r = depth_alignment_report(fixture(), depths, poses, intr);
  EXPECT_EQ(r.rmse_m, 0.0);
  EXPECT_EQ(r.abs_rel, 0.0);
  for (auto& d : depths)
    for (double& v : d.data()) v *= 1.1;
  EXPECT_NEAR(depth_alignment_report(fixture(), depths, poses, intr).abs_rel, 0.1, 1e-9);
}

TEST(Ply, RoundTripAndRejectsForeignFiles) {
  PointCloud c;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    c.positions.emplace_back(u(rng), u(rng), u(rng));
    c.colors.emplace_back(static_cast<float>(i % 3 == 0), 0.5f, 1.0f);
    c.semantic.push_back(static_cast<SemanticId>(i % 41));
    c.instance.push_back(static_cast<std::uint32_t>(1000000 + i));
  }
  const auto dir = temp_dir("ply");
  write_ply(c, dir / "c.ply");
  EXPECT_GT(std::filesystem::file_size(dir / "c.ply"), 100u * 21u);
  const PointCloud back = read_ply(dir / "c.ply");
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR((back.positions[i] - c.positions[i]).norm(), 0.0, 1e-6);
    EXPECT_NEAR((back.colors[i] - c.colors[i]).norm(), 0.0, 1.0 / 255.0);
    EXPECT_EQ(back.semantic[i], c.semantic[i]);
    EXPECT_EQ(back.instance[i], c.instance[i]);
  }
  std::ofstream(dir / "bad.ply") << "ply\nformat ascii 1.0\nend_header\n";
  EXPECT_THROW(read_ply(dir / "bad.ply"), IoError);
  EXPECT_THROW(read_ply(dir / "missing.ply"), IoError);
}

TEST(PointCloud, CheckAndAppend) {
  PointCloud a;
  a.positions = {Vec3(0, 0, 0)};
  a.semantic = {3};
  PointCloud b;
  b.positions = {Vec3(1, 0, 0), Vec3(2, 0, 0)};
  b.instance = {4, 5};
  a.append(b);
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a.semantic, (std::vector<SemanticId>{3, 0, 0}));
  EXPECT_EQ(a.instance, (std::vector<std::uint32_t>{0, 4, 5}));
  EXPECT_NO_THROW(a.check());
  a.semantic.pop_back();
  EXPECT_THROW(a.check(), ShapeMismatch);
  a.semantic.push_back(0);
  a.positions[0].x() = std::nan("");
  EXPECT_THROW(a.check(), DimensionError);
}
