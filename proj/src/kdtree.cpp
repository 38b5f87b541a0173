#include "proxykit/kdtree.hpp"

#include "proxykit/errors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace proxykit {

namespace {
constexpr std::size_t kLeafSize = 8;
}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)), index_(points_.size()) {
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  if (!points_.empty()) build(0, points_.size(), 0);
}

int KdTree::build(std::size_t first, std::size_t count, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  if (count <= kLeafSize) {
    nodes_[id].first = first;
    nodes_[id].count = count;
    return id;
  }
  Eigen::AlignedBox3d bounds;
  for (std::size_t i = first; i < first + count; ++i) bounds.extend(points_[index_[i]]);
  int axis = 0;
  bounds.sizes().maxCoeff(&axis);
  const std::size_t mid = count / 2;
  const auto begin = index_.begin() + static_cast<std::ptrdiff_t>(first);
  std::nth_element(begin, begin + static_cast<std::ptrdiff_t>(mid), begin + static_cast<std::ptrdiff_t>(count),
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[index_[first + mid]][axis];
  const int left = build(first, mid, depth + 1);
  const int right = build(first + mid, count - mid, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <class Visit>
void KdTree::search(int node_id, const Vec3& q, Visit& visit, double& bound) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.first; i < node.first + node.count; ++i) visit(index_[i], bound);
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, q, visit, bound);
  if (diff * diff <= bound) search(far, q, visit, bound);
}

KdTree::Neighbor KdTree::nearest(const Vec3& q) const {
  if (points_.empty()) throw EmptyReference("kd-tree is empty");
  std::size_t best = 0;
  double best_sq = kInf;
  auto visit = [&](std::size_t i, double& bound) {
    const double d = (points_[i] - q).squaredNorm();
    if (d < best_sq || (d == best_sq && i < best)) {
      best_sq = d;
      best = i;
      bound = d;
    }
  };
  double bound = kInf;
  search(0, q, visit, bound);
  return {best, std::sqrt(best_sq)};
}

std::vector<KdTree::Neighbor> KdTree::k_nearest(const Vec3& q, std::size_t k) const {
  if (points_.empty()) throw EmptyReference("kd-tree is empty");
  k = std::min(k, points_.size());
  if (k == 0) return {};
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;  // max-heap of the current k best
  auto visit = [&](std::size_t i, double& bound) {
    const Entry e{(points_[i] - q).squaredNorm(), i};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
    if (heap.size() == k) bound = heap.top().first;
  };
  double bound = kInf;
  search(0, q, visit, bound);
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0; heap.pop()) out[i] = {heap.top().second, std::sqrt(heap.top().first)};
  return out;
}

}  // namespace proxykit
