#include "proxykit/renderer.hpp"

#include "proxykit/parallel.hpp"
#include "proxykit/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace proxykit {

ProxyScene::ProxyScene(const SceneLayout& layout) {
  const std::vector<OrientedBox> cutters = wall_cutters(layout);
  for (std::size_t r = 0; r < layout.rooms.size(); ++r) {
    const Room& room = layout.rooms[r];
    const int ri = static_cast<int>(r);
    for (const OrientedBox& wall : wall_segments(room))
      for (const OrientedBox& piece : cut_wall(wall, cutters))
        boxes_.push_back({piece, label::kWall, structural_instance_id(ri, StructuralPart::wall)});
    const Polygon2 outline = slab_outline(room);
    slabs_.push_back({outline, room.floor_z, room.floor_z - room.wall_thickness, label::kFloor,
                      structural_instance_id(ri, StructuralPart::floor)});
    slabs_.push_back({outline, room.ceiling_z + room.wall_thickness, room.ceiling_z, label::kCeiling,
                      structural_instance_id(ri, StructuralPart::ceiling)});
  }
  for (const auto& o : layout.objects) boxes_.push_back({o.pose.box(), o.semantic_label, o.instance_id});
  for (const auto& c : layout.connectors) boxes_.push_back({c.pose.box(), c.semantic_label(), c.id});

  order_.resize(boxes_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!boxes_.empty()) {
    nodes_.reserve(2 * boxes_.size());
    build(0, static_cast<int>(boxes_.size()));
  }
}

int ProxyScene::build(int begin, int end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d bounds, centroids;
  for (int i = begin; i < end; ++i) {
    const auto& b = boxes_[order_[i]].box;
    bounds.extend(b.bounds());
    centroids.extend(b.center);
  }
  nodes_[index].bounds = bounds;
  if (end - begin <= 2) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  int axis;
  centroids.sizes().maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
    const double ca = boxes_[a].box.center[axis], cb = boxes_[b].box.center[axis];
    return ca < cb || (ca == cb && a < b);
  });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

namespace {

// Entry distance of a ray into an axis-aligned box, or +inf on a miss.
inline double aabb_entry(const Eigen::AlignedBox3d& b, const Vec3& o, const Vec3& inv, double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    double a = (b.min()[k] - o[k]) * inv[k];
    double c = (b.max()[k] - o[k]) * inv[k];
    if (a > c) std::swap(a, c);
    // NaN from 0 * inf (origin on a slab plane) is ignored by these comparisons.
    t0 = a > t0 ? a : t0;
    t1 = c < t1 ? c : t1;
    if (t0 > t1) return kInf;
  }
  return t0;
}

}  // namespace

SurfaceHit ProxyScene::cast(const Vec3& origin, const Vec3& dir) const {
  SurfaceHit best;
  if (!nodes_.empty()) {
    const Vec3 inv(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    int best_prim = -1;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (aabb_entry(node.bounds, origin, inv, best.t) == kInf) continue;
      if (node.left < 0) {
        for (int i = node.first; i < node.first + node.count; ++i) {
          const int prim = order_[i];
          const auto hit = intersect_ray_box(origin, dir, boxes_[prim].box);
          if (!hit) continue;
          if (hit->t < best.t || (hit->t == best.t && prim < best_prim)) {
            best.t = hit->t;
            best.normal = hit->normal;
            best.semantic = boxes_[prim].semantic;
            best.instance = boxes_[prim].instance;
            best_prim = prim;
          }
        }
        continue;
      }
      const double tl = aabb_entry(nodes_[node.left].bounds, origin, inv, best.t);
      const double tr = aabb_entry(nodes_[node.right].bounds, origin, inv, best.t);
      // Push the farther child first so the nearer one is visited next.
      if (tl <= tr) {
        if (tr != kInf) stack[top++] = node.right;
        if (tl != kInf) stack[top++] = node.left;
      } else {
        if (tl != kInf) stack[top++] = node.left;
        if (tr != kInf) stack[top++] = node.right;
      }
    }
  }
  if (dir.z() != 0.0) {
    for (const auto& slab : slabs_) {
      for (const double z : {slab.z_top, slab.z_bottom}) {
        const double t = (z - origin.z()) / dir.z();
        if (!(t >= 0.0) || t >= best.t) continue;
        const Vec3 p = origin + t * dir;
        if (!point_in_polygon(p.head<2>(), slab.outline)) continue;
        best.t = t;
        best.normal = Vec3(0, 0, z == slab.z_top ? 1.0 : -1.0);
        if (dir.z() * best.normal.z() > 0.0) best.normal = -best.normal;
        best.semantic = slab.semantic;
        best.instance = slab.instance;
      }
    }
  }
  return best;
}

RenderOutput ProxyScene::render(const RenderTarget& target) const {
  const Intrinsics& intr = target.intrinsics;
  intr.check();
  const int w = intr.width, h = intr.height;
  RenderOutput out;
  if (target.channels & kChannelDepth) out.depth.emplace(w, h, 1, kInf);
  if (target.channels & kChannelSemantic) out.semantic.emplace(w, h, 1, label::kVoid);
  if (target.channels & kChannelInstance) out.instance.emplace(w, h, 1, 0u);
  if (target.channels & kChannelNormal) out.normal.emplace(w, h, 3, 0.0);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < w; ++x) {
      const Ray ray = pixel_center_ray(intr, target.pose, x, y);
      const SurfaceHit hit = cast(ray.origin, ray.direction);
      if (hit.t == kInf) continue;
      if (out.depth) out.depth->at(x, y) = hit.t;
      if (out.semantic) out.semantic->at(x, y) = hit.semantic;
      if (out.instance) out.instance->at(x, y) = hit.instance;
      if (out.normal)
        for (int c = 0; c < 3; ++c) out.normal->at(x, y, c) = hit.normal[c];
    }
  });
  return out;
}

CubemapRender ProxyScene::render_cubemap(const CubemapRig& rig, int face_size, unsigned channels) const {
  CubemapRender out;
  auto init = [&](auto& cm, ChannelKind kind) {
    cm.emplace();
    cm->kind = kind;
    cm->face_fov_deg = rig.face_fov_deg;
    cm->yaw_rad = rig.yaw_rad;
  };
  if (channels & kChannelDepth) init(out.depth, ChannelKind::depth_m);
  if (channels & kChannelSemantic) init(out.semantic, ChannelKind::semantic_id);
  if (channels & kChannelInstance) init(out.instance, ChannelKind::instance_id);
  if (channels & kChannelNormal) init(out.normal, ChannelKind::xyz_dir);
  for (int f = 0; f < kCubeFaces; ++f) {
    RenderOutput r = render({rig.face_intrinsics(face_size), rig.face_pose(f), channels});
    if (out.depth) out.depth->faces[f] = std::move(*r.depth);
    if (out.semantic) out.semantic->faces[f] = std::move(*r.semantic);
    if (out.instance) out.instance->faces[f] = std::move(*r.instance);
    if (out.normal) out.normal->faces[f] = std::move(*r.normal);
  }
  return out;
}

double ProxyScene::min_depth_probe(const CameraPose& pose, const Intrinsics& intr, int probe_size) const {
  const RenderOutput r = render({intr.resized(probe_size, probe_size), pose, kChannelDepth});
  double m = kInf;
  for (double d : r.depth->data()) m = std::min(m, d);
  return m;
}

double ProxyScene::nearest_surface_distance(const Vec3& p) const {
  double best = kInf;
  for (const auto& b : boxes_) best = std::min(best, distance_point_box(p, b.box));
  for (const auto& s : slabs_) {
    const Vec2 xy = p.head<2>();
    const double horiz = point_in_polygon(xy, s.outline) ? 0.0 : distance_to_boundary(xy, s.outline);
    const double vert = p.z() > s.z_top ? p.z() - s.z_top : (p.z() < s.z_bottom ? s.z_bottom - p.z() : 0.0);
    best = std::min(best, std::hypot(horiz, vert));
  }
  return best;
}

bool ProxyScene::clearance_at_least(const CameraPose& pose, const Intrinsics& intr, double threshold) const {
  // Every depth is at least the distance to the nearest surface.
  if (nearest_surface_distance(pose.position) >= threshold) return true;
  const RenderOutput r = render({intr, pose, kChannelDepth});
  return std::all_of(r.depth->data().begin(), r.depth->data().end(), [&](double d) { return d >= threshold; });
}

RenderOutput render_view(const SceneLayout& layout, const RenderTarget& target) {
  return ProxyScene(layout).render(target);
}

CubemapRender render_cubemap(const SceneLayout& layout, const CubemapRig& rig, int face_size, unsigned channels) {
  return ProxyScene(layout).render_cubemap(rig, face_size, channels);
}

double min_depth_probe(const SceneLayout& layout, const CameraPose& pose, const Intrinsics& intr, int probe_size) {
  return ProxyScene(layout).min_depth_probe(pose, intr, probe_size);
}

}  // namespace proxykit
