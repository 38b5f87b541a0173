#include "proxykit/losses.hpp"

#include "proxykit/errors.hpp"
#include "proxykit/semantics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace proxykit {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;

std::array<double, kWindow> gaussian_window(double sigma) {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kRadius;
    w[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

/// Separable Gaussian filter of one channel with zero padding.
std::vector<double> blur(const std::vector<double>& src, int width, int height) {
  static const auto w = gaussian_window(1.5);
  std::vector<double> tmp(src.size(), 0.0), out(src.size(), 0.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        const int xx = x + k;
        if (xx >= 0 && xx < width) s += w[k + kRadius] * src[static_cast<std::size_t>(y) * width + xx];
      }
      tmp[static_cast<std::size_t>(y) * width + x] = s;
    }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        const int yy = y + k;
        if (yy >= 0 && yy < height) s += w[k + kRadius] * tmp[static_cast<std::size_t>(yy) * width + x];
      }
      out[static_cast<std::size_t>(y) * width + x] = s;
    }
  return out;
}

void require_same(const ImageD& a, const ImageD& b, const char* who) {
  if (!a.same_shape(b)) throw ShapeMismatch(std::string(who) + ": image shapes differ");
  if (a.empty()) throw ShapeMismatch(std::string(who) + ": empty image");
}

}  // namespace

double ssim(const ImageD& a, const ImageD& b) {
  require_same(a, b, "ssim");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int w = a.width(), h = a.height(), ch = a.channels();
  const std::size_t n = a.pixel_count();
  double total = 0.0;
  for (int c = 0; c < ch; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a.data()[i * ch + c];
      y[i] = b.data()[i * ch + c];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = blur(x, w, h), my = blur(y, w, h);
    const auto sxx = blur(xx, w, h), syy = blur(yy, w, h), sxy = blur(xy, w, h);
    for (std::size_t i = 0; i < n; ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
               ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
  }
  return total / static_cast<double>(n * ch);
}

double loss_3dgs(const ImageD& image, const ImageD& rendered, double lambda) {
  require_same(image, rendered, "loss_3dgs");
  double l1 = 0.0;
  for (std::size_t i = 0; i < image.data().size(); ++i) l1 += std::abs(image.data()[i] - rendered.data()[i]);
  l1 /= static_cast<double>(image.data().size());
  if (lambda == 0.0) return l1;
  return (1.0 - lambda) * l1 + lambda * (1.0 - ssim(image, rendered)) / 2.0;
}

MaskedLoss masked_depth_loss(const ImageD& rendered, const ImageD& reference, const Mask& mask) {
  if (!rendered.same_shape(reference) || !rendered.same_size(mask) || rendered.channels() != 1 || mask.channels() != 1)
    throw ShapeMismatch("masked_depth_loss: map shapes differ");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < rendered.data().size(); ++i) {
    if (!mask.data()[i]) continue;
    const double d = rendered.data()[i], g = reference.data()[i];
    if (!std::isfinite(d) || !std::isfinite(g)) continue;
    sum += std::abs(d - g);
    ++n;
  }
  if (n == 0) return {0.0, true};
  return {sum / static_cast<double>(n), false};
}

Mask mask_from_semantics(const SemanticImage& semantic) {
  Mask m(semantic.width(), semantic.height(), 1, 0);
  for (std::size_t i = 0; i < semantic.data().size(); ++i) {
    const SemanticId s = semantic.data()[i];
    m.data()[i] = (s == label::kWall || s == label::kFloor || s == label::kCeiling) ? 1 : 0;
  }
  return m;
}

double nn_loss(std::span<const Vec3> means, const KdTree& reference, NnCache& cache, long long iteration) {
  if (reference.size() == 0) throw EmptyReference("nn_loss: empty reference cloud");
  if (means.empty()) throw DimensionError("nn_loss: no means");
  if (cache.k < 1 || cache.refresh_interval < 1) throw DimensionError("nn_loss: invalid cache settings");
  if (cache.stale(iteration, means.size())) {
    cache.assignment.assign(means.size() * cache.k, 0);
    for (std::size_t l = 0; l < means.size(); ++l) {
      if (cache.k == 1) {
        cache.assignment[l] = reference.nearest(means[l]).index;
      } else {
        const auto nb = reference.k_nearest(means[l], cache.k);
        for (std::size_t j = 0; j < cache.k; ++j) cache.assignment[l * cache.k + j] = nb[std::min(j, nb.size() - 1)].index;
      }
    }
    cache.block = iteration / cache.refresh_interval;
    ++cache.refreshes;
  }
  std::vector<double> terms(means.size());
  for (std::size_t l = 0; l < means.size(); ++l) {
    double per = 0.0;
    for (std::size_t j = 0; j < cache.k; ++j)
      per += std::sqrt((means[l] - reference.point(cache.assignment[l * cache.k + j])).norm());
    terms[l] = per / static_cast<double>(cache.k);
  }
  // Summing in sorted order makes the result independent of the order of the means.
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(means.size());
}

double nn_loss(std::span<const Vec3> means, const PointCloud& reference, std::size_t k) {
  if (reference.empty()) throw EmptyReference("nn_loss: empty reference cloud");
  const KdTree tree(reference.positions);
  NnCache cache;
  cache.k = k;
  return nn_loss(means, tree, cache, 0);
}

std::vector<Vec3> nn_loss_gradient(std::span<const Vec3> means, const KdTree& reference, const NnCache& cache) {
  if (cache.assignment.size() != means.size() * cache.k) throw ShapeMismatch("nn_loss_gradient: cache does not match means");
  std::vector<Vec3> grad(means.size(), Vec3::Zero());
  const double scale = 1.0 / (static_cast<double>(means.size()) * static_cast<double>(cache.k));
  for (std::size_t l = 0; l < means.size(); ++l) {
    for (std::size_t j = 0; j < cache.k; ++j) {
      const Vec3 d = means[l] - reference.point(cache.assignment[l * cache.k + j]);
      const double r = d.norm();
      if (r == 0.0) continue;
      grad[l] += scale * 0.5 * std::pow(r, -1.5) * d;
    }
  }
  return grad;
}

TotalLoss total_loss(const LossParts& parts) {
  return {parts.l_3dgs + parts.l_geom.value_or(0.0) + parts.l_nn + parts.l_depth, !parts.l_geom.has_value()};
}

}  // namespace proxykit
