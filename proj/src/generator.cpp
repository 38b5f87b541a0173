#include "proxykit/generator.hpp"

#include "proxykit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace proxykit {
namespace {

// Portable uniform sampling: std::uniform_real_distribution is not
// bit-reproducible across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(rng_() % span);
  }

 private:
  std::mt19937_64 rng_;
};

double mount_height(SemanticId lbl) {
  switch (lbl) {
    case label::kWindow:
      return 1.5;
    case label::kPicture:
      return 1.6;
    case label::kMirror:
      return 1.4;
    default:
      return 0.0;
  }
}

}  // namespace

Vec3 nominal_object_size(SemanticId lbl) {
  switch (lbl) {
    case label::kCabinet: return {1.0, 0.5, 1.8};
    case label::kBed: return {2.0, 1.6, 0.55};
    case label::kChair: return {0.5, 0.5, 0.9};
    case label::kSofa: return {2.0, 0.9, 0.85};
    case label::kTable: return {1.4, 0.8, 0.75};
    case label::kDoor: return {0.9, 0.06, 2.05};
    case label::kWindow: return {1.2, 0.08, 1.2};
    case label::kBookshelf: return {0.9, 0.35, 2.0};
    case label::kPicture: return {0.8, 0.04, 0.6};
    case label::kDesk: return {1.2, 0.6, 0.75};
    case label::kDresser: return {1.0, 0.5, 0.9};
    case label::kMirror: return {0.6, 0.04, 1.0};
    case label::kNightStand: return {0.45, 0.4, 0.55};
    case label::kLamp: return {0.35, 0.35, 1.5};
    case label::kOtherFurniture: return {0.8, 0.6, 0.8};
    default: return {0.6, 0.6, 0.6};
  }
}

SceneLayout generate_layout(std::uint64_t seed, const GenSpec& spec) {
  if (!(spec.room_extent_min > 0.0 && spec.room_extent_max >= spec.room_extent_min) ||
      !(spec.ceiling_min > 0.0 && spec.ceiling_max >= spec.ceiling_min) ||
      spec.object_count_min < 0 || spec.object_count_max < spec.object_count_min ||
      (spec.object_count_max > 0 && spec.allowed_labels.empty()) || spec.wall_thickness <= 0.0) {
    throw GenerationError("degenerate generator spec");
  }
  Sampler rng(seed);

  const double w = round_sig9(rng.uniform(spec.room_extent_min, spec.room_extent_max));
  const double d = round_sig9(rng.uniform(spec.room_extent_min, spec.room_extent_max));
  const double h = round_sig9(rng.uniform(spec.ceiling_min, spec.ceiling_max));

  SceneLayout layout;
  layout.id = "generated-" + std::to_string(seed);
  Room room;
  room.floor_polygon = {Vec2(-w / 2, -d / 2), Vec2(w / 2, -d / 2), Vec2(w / 2, d / 2), Vec2(-w / 2, d / 2)};
  room.floor_z = 0.0;
  room.ceiling_z = h;
  room.wall_thickness = spec.wall_thickness;
  layout.rooms.push_back(room);

  const int count = rng.integer(spec.object_count_min, spec.object_count_max);
  std::vector<OrientedBox> placed;
  constexpr double kInset = 0.02;

  // A crowded room may have no space left for a large label, so a failed slot redraws its label a few times
  // and, once the minimum count is met, ends placement instead of failing the whole layout.
  constexpr int kLabelDraws = 4;
  for (int k = 0; k < count; ++k) {
    SemanticId lbl = 0;
    bool ok = false;
    for (int draw = 0; draw < kLabelDraws && !ok; ++draw) {
      lbl = spec.allowed_labels[rng.integer(0, static_cast<int>(spec.allowed_labels.size()) - 1)];
      for (int attempt = 0; attempt < spec.max_attempts && !ok; ++attempt) {
        Vec3 size = nominal_object_size(lbl) * rng.uniform(0.85, 1.15);
        Pose9D pose;
        if (is_wall_mounted(lbl)) {
          // Flush against one of the four walls, facing into the room.
          const int wall = rng.integer(0, 3);
          const double along_len = (wall % 2 == 0) ? w : d;
          const double half_w = 0.5 * size.x();
          if (along_len < size.x() + 2 * kInset) continue;
          const double s = rng.uniform(-along_len / 2 + half_w + kInset, along_len / 2 - half_w - kInset);
          const double off = 0.5 * size.y() + 0.001;
          const double yaw = wall * kPi / 2;  // local x along the wall
          Vec2 c;
          switch (wall) {
            case 0: c = Vec2(s, -d / 2 + off); break;
            case 1: c = Vec2(w / 2 - off, s); break;
            case 2: c = Vec2(-s, d / 2 - off); break;
            default: c = Vec2(-w / 2 + off, -s); break;
          }
          double z = mount_height(lbl);
          if (z <= 0.0) z = 0.5 * size.z();
          z = std::min(z, h - 0.5 * size.z() - 0.05);
          if (z - 0.5 * size.z() < 0.0) continue;
          pose.position = Vec3(c.x(), c.y(), z);
          pose.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
        } else {
          if (size.z() > h - 0.05) size.z() = h - 0.05;
          const double yaw = rng.uniform(0.0, 2 * kPi);
          const double x = rng.uniform(-w / 2, w / 2);
          const double y = rng.uniform(-d / 2, d / 2);
          pose.position = Vec3(x, y, 0.5 * size.z());
          pose.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
        }
        pose.scale = size;
        // Round once so that the accepted pose equals its serialized form.
        pose.position = pose.position.unaryExpr([](double v) { return round_sig9(v); });
        pose.scale = pose.scale.unaryExpr([](double v) { return round_sig9(v); });
        pose.orientation = Quat(round_sig9(pose.orientation.w()), round_sig9(pose.orientation.x()),
                                round_sig9(pose.orientation.y()), round_sig9(pose.orientation.z()));
        if (!is_wall_mounted(lbl)) pose.position.z() = round_sig9(0.5 * pose.scale.z());

        const OrientedBox box = pose.box();
        bool inside = true;
        for (const Vec3& c : box.corners()) {
          if (std::abs(c.x()) > w / 2 - 0.0005 || std::abs(c.y()) > d / 2 - 0.0005) {
            inside = false;
            break;
          }
        }
        if (!inside) continue;
        OrientedBox grown = box;
        grown.half.array() += 0.5 * spec.object_gap;
        bool clash = false;
        for (const auto& other : placed) {
          if (boxes_overlap(grown, other, 0.0)) {
            clash = true;
            break;
          }
        }
        if (clash) continue;

        placed.push_back(box);
        ProxyObject obj;
        obj.instance_id = static_cast<std::uint32_t>(k + 1);
        obj.semantic_label = lbl;
        obj.pose = pose;
        layout.objects.push_back(obj);
        ok = true;
      }
    }
    if (!ok && k >= spec.object_count_min) break;
    if (!ok) {
      throw GenerationError("could not place object " + std::to_string(k + 1) + " (" +
                            std::string(semantic_name(lbl)) + ") after " + std::to_string(spec.max_attempts) +
                            " attempts");
    }
  }
  validate_layout(layout);
  return layout;
}

}  // namespace proxykit
