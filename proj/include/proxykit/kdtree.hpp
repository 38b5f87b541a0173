#pragma once

#include "proxykit/geometry.hpp"

#include <span>
#include <vector>

namespace proxykit {

/// Static 3D kd-tree for exact nearest-neighbor queries.
class KdTree {
 public:
  struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
  };

  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Nearest stored point; ties go to the lower index. Requires size() > 0.
  Neighbor nearest(const Vec3& q) const;
  /// k nearest points in ascending distance (ties by index).
  std::vector<Neighbor> k_nearest(const Vec3& q, std::size_t k) const;

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
    std::size_t first = 0, count = 0;
  };
  int build(std::size_t first, std::size_t count, int depth);
  template <class Visit>
  void search(int node, const Vec3& q, Visit& visit, double& bound) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace proxykit
