#include "proxykit/expansion.hpp"

#include "proxykit/errors.hpp"
#include "proxykit/structure.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace proxykit {
namespace {

bool touches_room(const OrientedBox& box, const Room& room) {
  for (const auto& wall : wall_segments(room))
    if (boxes_overlap(box, wall, 0.0)) return true;
  return false;
}

void sort_openings(Room& room) {
  std::sort(room.openings.begin(), room.openings.end(), [](const Pose9D& a, const Pose9D& b) {
    return std::tie(a.position.x(), a.position.y(), a.position.z()) <
           std::tie(b.position.x(), b.position.y(), b.position.z());
  });
}

}  // namespace

SceneLayout expand_layout(const SceneLayout& base, const SceneLayout& addition, std::uint32_t connector_id) {
  const Connector* con = base.find_connector(connector_id);
  if (!con) throw UnknownId("connector " + std::to_string(connector_id) + " not found in base layout");
  if (con->room_b) throw ExpansionError("connector " + std::to_string(connector_id) + " is not dangling");
  if (addition.rooms.empty()) throw ExpansionError("addition has no rooms");

  std::set<std::uint32_t> ids;
  for (const auto& o : base.objects) ids.insert(o.instance_id);
  for (const auto& c : base.connectors) ids.insert(c.id);
  for (const auto& o : addition.objects)
    if (!ids.insert(o.instance_id).second)
      throw ExpansionError("instance id " + std::to_string(o.instance_id) + " used in both layouts");
  for (const auto& c : addition.connectors)
    if (!ids.insert(c.id).second) throw ExpansionError("connector id " + std::to_string(c.id) + " used in both layouts");

  const OrientedBox con_box = con->pose.box();
  const Polygon2 con_footprint = box_footprint(con_box);
  const std::vector<Polygon2> allowed = {con_footprint};
  for (std::size_t a = 0; a < base.rooms.size(); ++a) {
    for (std::size_t b = 0; b < addition.rooms.size(); ++b) {
      if (overlap_area(base.rooms[a].floor_polygon, addition.rooms[b].floor_polygon, 1e-3, allowed) > 1e-9)
        throw ExpansionError("addition room " + std::to_string(b) + " overlaps base room " + std::to_string(a));
    }
  }

  const int offset = static_cast<int>(base.rooms.size());
  std::optional<int> joined;
  for (std::size_t b = 0; b < addition.rooms.size() && !joined; ++b)
    if (touches_room(con_box, addition.rooms[b])) joined = offset + static_cast<int>(b);
  if (!joined) throw ExpansionError("addition does not meet connector " + std::to_string(connector_id));

  SceneLayout merged;
  merged.id = base.id + "+" + addition.id;
  merged.rooms = base.rooms;
  merged.rooms.insert(merged.rooms.end(), addition.rooms.begin(), addition.rooms.end());
  merged.objects = base.objects;
  merged.objects.insert(merged.objects.end(), addition.objects.begin(), addition.objects.end());

  for (const auto& c : base.connectors) {
    if (c.id != connector_id) {
      merged.connectors.push_back(c);
      continue;
    }
    if (c.kind == ConnectorKind::door) {
      Connector kept = c;
      kept.room_b = *joined;
      merged.connectors.push_back(kept);
    } else {
      merged.rooms[c.room_a].openings.push_back(c.pose);
      merged.rooms[*joined].openings.push_back(c.pose);
      sort_openings(merged.rooms[c.room_a]);
      sort_openings(merged.rooms[*joined]);
    }
  }
  for (auto c : addition.connectors) {
    c.room_a += offset;
    if (c.room_b) *c.room_b += offset;
    merged.connectors.push_back(c);
  }
  try {
    validate_layout(merged);
  } catch (const ValidationError& e) {
    throw ExpansionError(std::string("merged layout invalid: ") + e.what());
  }
  return merged;
}

PointCloud remove_labeled_points(const PointCloud& cloud, const SceneLayout& layout, std::uint32_t connector_id) {
  const Connector* con = layout.find_connector(connector_id);
  if (!con) throw UnknownId("connector " + std::to_string(connector_id) + " not found");
  cloud.check();
  const OrientedBox box = con->pose.box();
  std::vector<std::size_t> keep;
  keep.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::uint32_t inst = cloud.has_instance() ? cloud.instance[i] : 0u;
    if (inst == connector_id) continue;
    if (inst == 0u && box.contains(cloud.positions[i], 0.01)) continue;
    keep.push_back(i);
  }
  return cloud.select(keep);
}

}  // namespace proxykit
