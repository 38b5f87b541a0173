#pragma once

#include "proxykit/geometry.hpp"
#include "proxykit/polygon.hpp"
#include "proxykit/semantics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace proxykit {

/// Position, orientation and full box extents (meters) of a proxy entity.
struct Pose9D {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 scale = Vec3::Ones();

  OrientedBox box() const;
  static Pose9D from_box(const OrientedBox& box);
};

struct Room {
  Polygon2 floor_polygon;
  double floor_z = 0.0;
  double ceiling_z = 2.8;
  double wall_thickness = 0.1;
  /// Wall cut-outs left behind by merged connectors.
  std::vector<Pose9D> openings;
};

struct ProxyObject {
  std::uint32_t instance_id = 1;
  SemanticId semantic_label = label::kOtherFurniture;
  Pose9D pose;
};

enum class ConnectorKind { door, temporary_wall };

/// Door or temporary wall joining `room_a` to `room_b`; dangling while
/// `room_b` is empty. `id` is also the connector's instance label.
struct Connector {
  std::uint32_t id = 1;
  ConnectorKind kind = ConnectorKind::door;
  Pose9D pose;
  int room_a = 0;
  std::optional<int> room_b;

  SemanticId semantic_label() const {
    return kind == ConnectorKind::door ? label::kDoor : label::kWall;
  }
};

/// Metric indoor scene proxy. Right-handed, +Z up, meters.
struct SceneLayout {
  std::string id;
  std::vector<Room> rooms;
  std::vector<ProxyObject> objects;
  std::vector<Connector> connectors;

  const Connector* find_connector(std::uint32_t id) const;
};

/// Reserved instance ids for structural surfaces never collide with entity ids.
inline constexpr std::uint32_t kStructuralInstanceBase = 1'000'000;
enum class StructuralPart : std::uint32_t { wall = 0, floor = 1, ceiling = 2 };
inline std::uint32_t structural_instance_id(int room_index, StructuralPart part) {
  return kStructuralInstanceBase + static_cast<std::uint32_t>(room_index) * 3 +
         static_cast<std::uint32_t>(part);
}

/// Throws ValidationError naming the first violated invariant.
void validate_layout(const SceneLayout& layout);

SceneLayout parse_layout(const std::string& json_text);
std::string serialize_layout(const SceneLayout& layout);
SceneLayout load_layout(const std::filesystem::path& path);
void save_layout(const SceneLayout& layout, const std::filesystem::path& path);

/// Index of the room whose floor polygon contains (x, y), if any.
std::optional<int> room_containing(const SceneLayout& layout, const Vec2& p);

/// Value as it survives serialization (9 significant digits).
double round_sig9(double v);

}  // namespace proxykit
