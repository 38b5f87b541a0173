#include "proxykit/cubemap.hpp"
#include "proxykit/errors.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace proxykit;
using namespace testing_support;

namespace {

/// Smooth function on the sphere: low-order polynomial plus a gentle sinusoid.
double pattern(const Vec3& d) {
  return 0.5 + 0.2 * d.x() - 0.1 * d.y() + 0.12 * d.z() + 0.08 * std::sin(2.0 * d.x() + d.y()) * d.z();
}

ImageD pattern_equirect(int w, int h) {
  ImageD img(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = pattern(equirect_direction(w, h, x + 0.5, y + 0.5));
  return img;
}

double psnr(const ImageD& a, const ImageD& b) {
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) mse += std::pow(a.data()[i] - b.data()[i], 2);
  mse /= static_cast<double>(a.data().size());
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace

TEST(Equirect, ForwardColumnAndInverse) {
  EXPECT_TRUE(equirect_direction(512, 256, 256, 128).isApprox(Vec3::UnitX(), 1e-12));
  // Columns increase to the right: a quarter turn right of +X is -Y.
  EXPECT_TRUE(equirect_direction(512, 256, 384, 128).isApprox(-Vec3::UnitY(), 1e-12));
  for (double u : {10.5, 100.25, 300.0, 500.75})
    for (double v : {3.5, 64.0, 200.5}) {
      const Vec2 back = equirect_coords(512, 256, equirect_direction(512, 256, u, v));
      EXPECT_NEAR(back.x(), u, 1e-9);
      EXPECT_NEAR(back.y(), v, 1e-9);
    }
}

TEST(Equirect, ConstantImageGivesConstantFaces) {
  const ImageD img(64, 32, 1, 0.375);
  const Cubemap<double> cube = equirect_to_cubemap(img, 16, 95.0);
  for (const auto& face : cube.faces)
    for (double v : face.data()) EXPECT_EQ(v, 0.375);
  EXPECT_THROW(equirect_to_cubemap(ImageD(60, 32), 16, 90.0), DimensionError);
}

TEST(Equirect, RoundTripPsnr) {
  const ImageD src = pattern_equirect(1024, 512);
  const ImageD back = cubemap_to_equirect(equirect_to_cubemap(src, 256, 90.0), 1024, 512);
  EXPECT_GT(psnr(src, back), 40.0);
}

TEST(Equirect, YawedRigRoundTrip) {
  const ImageD src = pattern_equirect(512, 256);
  const Cubemap<double> cube = equirect_to_cubemap(src, 128, 90.0, 0.3);
  EXPECT_GT(psnr(src, cubemap_to_equirect(cube, 512, 256)), 35.0);
}

TEST(Xyz, FaceCentersAreSignedAxes) {
  const Cubemap<double> xyz = xyz_positional_encoding(CubemapRig{}, 2);
  const Vec3 axes[kCubeFaces] = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
  for (int f = 0; f < kCubeFaces; ++f) {
    // Average of the four central pixels of a 2x2 face points at the face center.
    Vec3 sum = Vec3::Zero();
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) sum += Vec3(xyz.faces[f].at(x, y, 0), xyz.faces[f].at(x, y, 1), xyz.faces[f].at(x, y, 2));
    EXPECT_TRUE(sum.normalized().isApprox(axes[f], 1e-12)) << f;
  }
  const CubemapRig rig{Vec3::Zero(), 0.0, 90.0};
  EXPECT_TRUE(pixel_ray(rig.face_intrinsics(64), rig.face_pose(4), 32, 32).direction.isApprox(Vec3::UnitZ(), 1e-15));
}

TEST(Xyz, EqualsPixelRayAndUnitNorm) {
  const CubemapRig rig{Vec3(1, 2, 3), 0.4, 95.0};
  const int n = 32;
  const Cubemap<double> xyz = xyz_positional_encoding(rig, n);
  for (int f = 0; f < kCubeFaces; ++f)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 d = pixel_center_ray(rig.face_intrinsics(n), rig.face_pose(f), x, y).direction;
        const Vec3 e(xyz.faces[f].at(x, y, 0), xyz.faces[f].at(x, y, 1), xyz.faces[f].at(x, y, 2));
        ASSERT_LE((d - e).norm(), 1e-12);
        ASSERT_NEAR(e.norm(), 1.0, 1e-6);
      }
}

TEST(Xyz, EdgeContinuityBetweenXAndZFaces) {
  const int n = 64;
  const Cubemap<double> xyz = xyz_positional_encoding(CubemapRig{}, n);
  const double step = deg2rad(90.0) / n;
  auto dir = [&](int f, int x, int y) {
    return Vec3(xyz.faces[f].at(x, y, 0), xyz.faces[f].at(x, y, 1), xyz.faces[f].at(x, y, 2));
  };
  const int px = 0, pz = 4, nz = 5;
  for (int x = 0; x < n; ++x) {
    // +X top row meets +Z bottom row; +X bottom row meets -Z top row.
    EXPECT_LE(std::acos(std::min(1.0, dir(px, x, 0).dot(dir(pz, x, n - 1)))), step + 1e-12) << x;
    EXPECT_LE(std::acos(std::min(1.0, dir(px, x, n - 1).dot(dir(nz, x, 0)))), step + 1e-12) << x;
  }
}

TEST(Crop, OverlapCropMatchesDirect90Directions) {
  const CubemapRig wide{Vec3::Zero(), 0.25, 95.0};
  const CubemapRig square{Vec3::Zero(), 0.25, 90.0};
  const Cubemap<double> cropped = crop_overlap(xyz_positional_encoding(wide, 136), 128);
  const Cubemap<double> direct = xyz_positional_encoding(square, 128);
  double worst = 0.0;
  for (int f = 0; f < kCubeFaces; ++f)
    for (std::size_t i = 0; i < direct.faces[f].data().size(); ++i)
      worst = std::max(worst, std::abs(cropped.faces[f].data()[i] - direct.faces[f].data()[i]));
  EXPECT_LE(worst, 1e-6);
  EXPECT_EQ(cropped.face_fov_deg, 90.0);
}

TEST(Crop, SourceCoordinatesOfCenterAndCorner) {
  const Vec2 c = crop_source_coords(128, 95.0, 136, 64.0, 64.0);
  EXPECT_NEAR(c.x(), 68.0, 1e-12);
  EXPECT_NEAR(c.y(), 68.0, 1e-12);
  // The 90 degree face border lies inside the 95 degree face at tan(45)/tan(47.5) of the half width.
  const Vec2 e = crop_source_coords(128, 95.0, 136, 0.0, 64.0);
  EXPECT_NEAR(68.0 - e.x(), 68.0 * 1.0 / std::tan(deg2rad(47.5)), 1e-9);
}

TEST(Crop, SmoothChannelBilinear) {
  const ImageD src = pattern_equirect(1024, 512);
  const Cubemap<double> wide = equirect_to_cubemap(src, 272, 95.0);
  const Cubemap<double> direct = equirect_to_cubemap(src, 256, 90.0);
  const Cubemap<double> cropped = crop_overlap(wide, 256);
  for (int f = 0; f < kCubeFaces; ++f)
    for (std::size_t i = 0; i < direct.faces[f].data().size(); ++i)
      ASSERT_NEAR(cropped.faces[f].data()[i], direct.faces[f].data()[i], 2e-3);
}
