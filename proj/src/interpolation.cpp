#include "proxykit/interpolation.hpp"

#include "proxykit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace proxykit {
namespace {

Vec3 knot_lerp(const Vec3& a, const Vec3& b, double ta, double tb, double t) {
  const double dt = tb - ta;
  if (dt < 1e-12) return b;
  return ((tb - t) * a + (t - ta) * b) / dt;
}

/// Barry-Goldman evaluation of the centripetal segment between p1 and p2.
Vec3 centripetal_point(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double s) {
  const double t0 = 0.0;
  const double t1 = t0 + std::sqrt((p1 - p0).norm());
  const double t2 = t1 + std::sqrt((p2 - p1).norm());
  const double t3 = t2 + std::sqrt((p3 - p2).norm());
  if (t2 - t1 < 1e-12) return p1;
  const double t = t1 + s * (t2 - t1);
  const Vec3 a1 = knot_lerp(p0, p1, t0, t1, t);
  const Vec3 a2 = knot_lerp(p1, p2, t1, t2, t);
  const Vec3 a3 = knot_lerp(p2, p3, t2, t3, t);
  const Vec3 b1 = knot_lerp(a1, a2, t0, t2, t);
  const Vec3 b2 = knot_lerp(a2, a3, t1, t3, t);
  return knot_lerp(b1, b2, t1, t2, t);
}

}  // namespace

std::vector<int> allocate_segment_frames(std::span<const double> weights, int extra) {
  const std::size_t n = weights.size();
  std::vector<int> out(n, 0);
  if (n == 0 || extra <= 0) return out;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> remainder(n);
  int assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = total > 0.0 ? extra * weights[i] / total : static_cast<double>(extra) / n;
    out[i] = static_cast<int>(std::floor(share));
    remainder[i] = share - out[i];
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < extra; k = (k + 1) % n, ++assigned) ++out[order[k]];
  return out;
}

std::vector<CameraPose> interpolate_poses(std::span<const CameraPose> keys, int n_out, const InterpolationOptions& opts) {
  const int n = static_cast<int>(keys.size());
  if (n < 2) throw DegenerateInput("interpolate_poses: need at least two keyframes");
  if (n_out < n) throw DegenerateInput("interpolate_poses: n_out smaller than keyframe count");

  std::vector<double> weights(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double chord = (keys[i + 1].position - keys[i].position).norm();
    const double angle = rotation_angle_between(keys[i].rotation, keys[i + 1].rotation);
    if (chord < 1e-9 && angle < 1e-9)
      throw DegenerateInput("interpolate_poses: consecutive keyframes " + std::to_string(i) + " and " +
                            std::to_string(i + 1) + " coincide");
    weights[i] = chord + opts.rotation_length_scale * angle;
  }
  const std::vector<int> interior = allocate_segment_frames(weights, n_out - n);

  // Phantom end points: quadratic extrapolation keeps arcs round at the ends.
  auto pos = [&](int i) -> Vec3 {
    if (i >= 0 && i < n) return keys[i].position;
    if (i < 0) {
      if (n >= 3) return 3.0 * keys[0].position - 3.0 * keys[1].position + keys[2].position;
      return 2.0 * keys[0].position - keys[1].position;
    }
    if (n >= 3) return 3.0 * keys[n - 1].position - 3.0 * keys[n - 2].position + keys[n - 3].position;
    return 2.0 * keys[n - 1].position - keys[n - 2].position;
  };

  std::vector<CameraPose> out;
  out.reserve(n_out);
  for (int i = 0; i + 1 < n; ++i) {
    out.push_back(keys[i]);
    Quat q0 = keys[i].rotation.normalized();
    Quat q1 = keys[i + 1].rotation.normalized();
    if (q0.dot(q1) < 0.0) q1.coeffs() = -q1.coeffs();
    const int m = interior[i];
    for (int j = 1; j <= m; ++j) {
      const double s = static_cast<double>(j) / (m + 1);
      const Vec3 p = centripetal_point(pos(i - 1), pos(i), pos(i + 1), pos(i + 2), s);
      out.emplace_back(q0.slerp(s, q1), p);
    }
  }
  out.push_back(keys[n - 1]);
  return out;
}

}  // namespace proxykit
