#include "proxykit/geometry.hpp"
#include "proxykit/polygon.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace proxykit;
using namespace testing_support;

namespace {

OrientedBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0), ext(0.05, 1.5);
  OrientedBox b;
  b.center = Vec3(pos(rng), pos(rng), pos(rng));
  b.axes = random_rotation(rng).toRotationMatrix();
  b.half = Vec3(ext(rng), ext(rng), ext(rng));
  return b;
}

}  // namespace

TEST(RayBox, MatchesFacePlaneOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::normal_distribution<double> n(0.0, 1.0);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) {
    const OrientedBox box = random_box(rng);
    const Vec3 o(pos(rng), pos(rng), pos(rng));
    // Aim half of the rays near the box so hits are common.
    Vec3 d = i % 2 ? Vec3(n(rng), n(rng), n(rng)) : Vec3(box.center + 0.8 * box.half.cwiseProduct(Vec3(n(rng), n(rng), n(rng))) - o);
    d.normalize();
    const auto got = intersect_ray_box(o, d, box);
    const auto want = face_plane_hit(o, d, box);
    ASSERT_EQ(got.has_value(), want.has_value()) << i;
    if (got) {
      ++hits;
      EXPECT_NEAR(got->t, *want, 1e-9) << i;
    }
  }
  EXPECT_GT(hits, 5000);
}

TEST(RayBox, InsideOriginReportsExitFaceTowardViewer) {
  OrientedBox b;
  b.half = Vec3(1.0, 2.0, 3.0);
  const auto hit = intersect_ray_box(Vec3::Zero(), Vec3::UnitY(), b);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 2.0);
  // Seen from inside, the reported normal faces back toward the ray origin.
  EXPECT_TRUE(hit->normal.isApprox(-Vec3::UnitY()));
}

TEST(RayBox, UnitCubeFrontFace) {
  OrientedBox b;
  b.center = Vec3(2, 0, 0);
  const auto hit = intersect_ray_box(Vec3::Zero(), Vec3::UnitX(), b);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 1.5);
  EXPECT_TRUE(hit->normal.isApprox(-Vec3::UnitX()));
}

TEST(BoxOverlap, AgreesWithPointSampling) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const OrientedBox a = random_box(rng), b = random_box(rng);
    const bool sat = boxes_overlap(a, b);
    bool witness = false;
    for (int k = 0; k < 4000 && !witness; ++k) {
      const Vec3 p = a.to_world(a.half.cwiseProduct(Vec3(u(rng), u(rng), u(rng))));
      witness = b.contains(p);
    }
    // A shared interior point proves overlap; separated boxes can never have one.
    if (witness) {
      EXPECT_TRUE(sat) << i;
    }
    if (!sat) {
      EXPECT_FALSE(witness) << i;
    }
  }
}

TEST(BoxOverlap, TouchingFacesDoNotOverlap) {
  OrientedBox a, b;
  b.center = Vec3(1.0, 0.0, 0.0);
  EXPECT_FALSE(boxes_overlap(a, b));
  b.center = Vec3(0.99, 0.0, 0.0);
  EXPECT_TRUE(boxes_overlap(a, b));
  EXPECT_FALSE(boxes_overlap(a, b, 0.02));
}

TEST(PointBoxDistance, MatchesSurfaceSampling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const OrientedBox b = random_box(rng);
    const Vec3 p(pos(rng), pos(rng), pos(rng));
    const double d = distance_point_box(p, b);
    if (b.contains(p)) {
      EXPECT_EQ(d, 0.0);
      continue;
    }
    // Clamp in the local frame: the nearest point of a solid box.
    const Vec3 local = b.to_local(p);
    const Vec3 clamped = local.cwiseMax(-b.half).cwiseMin(b.half);
    EXPECT_NEAR(d, (local - clamped).norm(), 1e-12);
    for (int k = 0; k < 2000; ++k) {
      const Vec3 s = b.to_world(b.half.cwiseProduct(Vec3(u(rng), u(rng), u(rng))));
      ASSERT_GE((s - p).norm(), d - 1e-12);
    }
  }
}

TEST(Rotation, GeodesicAngle) {
  const Quat a(Eigen::AngleAxisd(0.3, Vec3::UnitZ()));
  const Quat b(Eigen::AngleAxisd(1.0, Vec3::UnitZ()));
  EXPECT_NEAR(rotation_angle_between(a, b), 0.7, 1e-12);
  EXPECT_NEAR(rotation_angle_between(a, Quat(-a.coeffs())), 0.0, 1e-12);
  EXPECT_NEAR(rotation_angle_between(a, a), 0.0, 0.0);
  const Quat tiny(Eigen::AngleAxisd(1e-9, Vec3::UnitX()));
  EXPECT_NEAR(rotation_angle_between(Quat::Identity(), tiny), 1e-9, 1e-15);
}

TEST(Polygon, AreaAndContainment) {
  const Polygon2 sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_DOUBLE_EQ(signed_area(sq), 4.0);
  const Polygon2 cw(sq.rbegin(), sq.rend());
  EXPECT_DOUBLE_EQ(signed_area(cw), -4.0);
  EXPECT_TRUE(point_in_polygon({1, 1}, sq));
  EXPECT_FALSE(point_in_polygon({3, 1}, sq));
  EXPECT_DOUBLE_EQ(distance_to_boundary({1, 0.5}, sq), 0.5);
  EXPECT_TRUE(closest_boundary_point({3, 1}, sq).isApprox(Vec2(2, 1)));
  EXPECT_TRUE(area_centroid(sq).isApprox(Vec2(1, 1)));
}

TEST(Polygon, LShapeCentroidAndContainment) {
  const Polygon2 l = {{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}};
  EXPECT_DOUBLE_EQ(signed_area(l), 12.0);
  // Composite of a 4x2 slab (centroid (2,1)) and a 2x2 block (centroid (1,3)).
  EXPECT_TRUE(area_centroid(l).isApprox(Vec2((8 * 2 + 4 * 1) / 12.0, (8 * 1 + 4 * 3) / 12.0)));
  EXPECT_FALSE(point_in_polygon({3, 3}, l));
  EXPECT_TRUE(point_in_polygon({1, 3}, l));
}

TEST(Polygon, Simplicity) {
  EXPECT_TRUE(is_simple_polygon(Polygon2{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  EXPECT_FALSE(is_simple_polygon(Polygon2{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
}

TEST(Polygon, OverlapAndInflate) {
  const Polygon2 a = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const Polygon2 b = {{1, 1}, {3, 1}, {3, 3}, {1, 3}};
  EXPECT_NEAR(overlap_area(a, b, 0.0), 1.0, 1e-12);
  const Polygon2 c = {{2, 0}, {4, 0}, {4, 2}, {2, 2}};
  EXPECT_NEAR(overlap_area(a, c, 1e-3), 0.0, 1e-12);
  const std::vector<Polygon2> hole = {{{0.5, 0.5}, {2.5, 0.5}, {2.5, 2.5}, {0.5, 2.5}}};
  EXPECT_NEAR(overlap_area(a, b, 0.0, hole), 0.0, 1e-12);
  const Polygon2 grown = inflate_polygon(a, 0.25);
  EXPECT_NEAR(signed_area(grown), 2.5 * 2.5, 1e-9);
}
