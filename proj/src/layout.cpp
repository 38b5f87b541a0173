#include "proxykit/layout.hpp"

#include "proxykit/errors.hpp"
#include "proxykit/structure.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace proxykit {

using nlohmann::json;

OrientedBox Pose9D::box() const {
  OrientedBox b;
  b.center = position;
  b.axes = orientation.normalized().toRotationMatrix();
  b.half = 0.5 * scale;
  return b;
}

Pose9D Pose9D::from_box(const OrientedBox& box) {
  Pose9D p;
  p.position = box.center;
  p.orientation = Quat(box.axes).normalized();
  p.scale = 2.0 * box.half;
  return p;
}

const Connector* SceneLayout::find_connector(std::uint32_t cid) const {
  for (const auto& c : connectors)
    if (c.id == cid) return &c;
  return nullptr;
}

double round_sig9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

namespace {

// ---------------------------------------------------------------- to json

json vec_json(const Vec3& v) { return json::array({round_sig9(v.x()), round_sig9(v.y()), round_sig9(v.z())}); }

json pose_json(const Pose9D& p) {
  const Quat& q = p.orientation;
  return json{{"position", vec_json(p.position)},
              {"quaternion", json::array({round_sig9(q.w()), round_sig9(q.x()), round_sig9(q.y()),
                                          round_sig9(q.z())})},
              {"scale", vec_json(p.scale)}};
}

// -------------------------------------------------------------- from json

void require_keys(const json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const char* k : required)
    if (!j.contains(k)) throw ParseError(where + ": missing key '" + k + "'");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

Vec3 vec3_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ParseError(where + ": expected [x,y,z]");
  return {num(j[0], where), num(j[1], where), num(j[2], where)};
}

Pose9D pose_from(const json& j, const std::string& where) {
  require_keys(j, {"position", "quaternion", "scale"}, {}, where);
  Pose9D p;
  p.position = vec3_from(j["position"], where + ".position");
  const json& q = j["quaternion"];
  if (!q.is_array() || q.size() != 4) throw ParseError(where + ".quaternion: expected [w,x,y,z]");
  p.orientation = Quat(num(q[0], where), num(q[1], where), num(q[2], where), num(q[3], where));
  p.scale = vec3_from(j["scale"], where + ".scale");
  return p;
}

std::uint32_t id_from(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer id");
  auto v = j.get<long long>();
  if (v < 0 || v > 0xFFFFFFFFll) throw ParseError(where + ": id out of range");
  return static_cast<std::uint32_t>(v);
}

SceneLayout layout_from_json(const json& j) {
  require_keys(j, {"id", "rooms", "objects", "connectors"}, {"units", "up_axis"}, "layout");
  if (j.contains("units") && j["units"] != "meters") throw ParseError("layout: units must be 'meters'");
  if (j.contains("up_axis") && j["up_axis"] != "+Z") throw ParseError("layout: up_axis must be '+Z'");
  if (!j["id"].is_string()) throw ParseError("layout.id: expected a string");
  SceneLayout out;
  out.id = j["id"].get<std::string>();

  if (!j["rooms"].is_array()) throw ParseError("layout.rooms: expected an array");
  for (std::size_t i = 0; i < j["rooms"].size(); ++i) {
    const json& r = j["rooms"][i];
    const std::string where = "rooms[" + std::to_string(i) + "]";
    require_keys(r, {"floor_polygon", "floor_z", "ceiling_z", "wall_thickness"}, {"openings"}, where);
    Room room;
    if (!r["floor_polygon"].is_array()) throw ParseError(where + ".floor_polygon: expected an array");
    for (const json& v : r["floor_polygon"]) {
      if (!v.is_array() || v.size() != 2) throw ParseError(where + ".floor_polygon: expected [x,y] points");
      room.floor_polygon.emplace_back(num(v[0], where), num(v[1], where));
    }
    room.floor_z = num(r["floor_z"], where + ".floor_z");
    room.ceiling_z = num(r["ceiling_z"], where + ".ceiling_z");
    room.wall_thickness = num(r["wall_thickness"], where + ".wall_thickness");
    if (r.contains("openings")) {
      if (!r["openings"].is_array()) throw ParseError(where + ".openings: expected an array");
      for (const json& o : r["openings"]) room.openings.push_back(pose_from(o, where + ".openings"));
    }
    out.rooms.push_back(std::move(room));
  }

  if (!j["objects"].is_array()) throw ParseError("layout.objects: expected an array");
  for (std::size_t i = 0; i < j["objects"].size(); ++i) {
    const json& o = j["objects"][i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    require_keys(o, {"instance_id", "semantic_label", "pose"}, {"name"}, where);
    ProxyObject obj;
    obj.instance_id = id_from(o["instance_id"], where + ".instance_id");
    if (!o["semantic_label"].is_number_integer()) throw ParseError(where + ".semantic_label: expected an integer");
    auto lbl = o["semantic_label"].get<long long>();
    if (lbl < 0 || lbl > 0xFFFF) {
      throw ValidationError("semantic_label out of range", "object " + std::to_string(obj.instance_id));
    }
    obj.semantic_label = static_cast<SemanticId>(lbl);
    obj.pose = pose_from(o["pose"], where + ".pose");
    out.objects.push_back(obj);
  }

  if (!j["connectors"].is_array()) throw ParseError("layout.connectors: expected an array");
  for (std::size_t i = 0; i < j["connectors"].size(); ++i) {
    const json& c = j["connectors"][i];
    const std::string where = "connectors[" + std::to_string(i) + "]";
    require_keys(c, {"id", "kind", "pose", "room_a", "room_b"}, {}, where);
    Connector con;
    con.id = id_from(c["id"], where + ".id");
    const std::string kind = c["kind"].is_string() ? c["kind"].get<std::string>() : "";
    if (kind == "door") {
      con.kind = ConnectorKind::door;
    } else if (kind == "temporary_wall") {
      con.kind = ConnectorKind::temporary_wall;
    } else {
      throw ParseError(where + ".kind: expected 'door' or 'temporary_wall'");
    }
    con.pose = pose_from(c["pose"], where + ".pose");
    if (!c["room_a"].is_number_integer()) throw ParseError(where + ".room_a: expected an integer");
    con.room_a = c["room_a"].get<int>();
    if (!c["room_b"].is_null()) {
      if (!c["room_b"].is_number_integer()) throw ParseError(where + ".room_b: expected an integer or null");
      con.room_b = c["room_b"].get<int>();
    }
    out.connectors.push_back(con);
  }
  return out;
}

json layout_to_json(const SceneLayout& layout) {
  json rooms = json::array();
  for (const auto& r : layout.rooms) {
    json poly = json::array();
    for (const auto& v : r.floor_polygon) poly.push_back(json::array({round_sig9(v.x()), round_sig9(v.y())}));
    json room{{"floor_polygon", poly},
              {"floor_z", round_sig9(r.floor_z)},
              {"ceiling_z", round_sig9(r.ceiling_z)},
              {"wall_thickness", round_sig9(r.wall_thickness)}};
    if (!r.openings.empty()) {
      json ops = json::array();
      for (const auto& o : r.openings) ops.push_back(pose_json(o));
      room["openings"] = ops;
    }
    rooms.push_back(room);
  }
  json objects = json::array();
  for (const auto& o : layout.objects) {
    objects.push_back(json{{"instance_id", o.instance_id},
                           {"semantic_label", o.semantic_label},
                           {"name", std::string(semantic_name(o.semantic_label))},
                           {"pose", pose_json(o.pose)}});
  }
  json connectors = json::array();
  for (const auto& c : layout.connectors) {
    connectors.push_back(json{{"id", c.id},
                              {"kind", c.kind == ConnectorKind::door ? "door" : "temporary_wall"},
                              {"pose", pose_json(c.pose)},
                              {"room_a", c.room_a},
                              {"room_b", c.room_b ? json(*c.room_b) : json(nullptr)}});
  }
  return json{{"id", layout.id},
              {"units", "meters"},
              {"up_axis", "+Z"},
              {"rooms", rooms},
              {"objects", objects},
              {"connectors", connectors}};
}

// ------------------------------------------------------------- validation

std::string object_name(const ProxyObject& o) { return "object " + std::to_string(o.instance_id); }
std::string connector_name(const Connector& c) { return "connector " + std::to_string(c.id); }

bool finite3(const Vec3& v) { return v.allFinite(); }

void validate_pose(const Pose9D& p, const std::string& entity) {
  if (!finite3(p.position) || !finite3(p.scale) || !p.orientation.coeffs().allFinite())
    throw ValidationError("non-finite pose", entity);
  if (std::abs(p.orientation.norm() - 1.0) > 1e-6) throw ValidationError("quaternion not unit norm", entity);
  if ((p.scale.array() <= 0.0).any()) throw ValidationError("scale must be strictly positive", entity);
}

bool connector_touches_room(const Connector& c, const Room& room) {
  const OrientedBox box = c.pose.box();
  for (const auto& wall : wall_segments(room))
    if (boxes_overlap(box, wall, 0.0)) return true;
  return false;
}

}  // namespace

std::optional<int> room_containing(const SceneLayout& layout, const Vec2& p) {
  for (std::size_t i = 0; i < layout.rooms.size(); ++i)
    if (point_in_polygon(p, layout.rooms[i].floor_polygon)) return static_cast<int>(i);
  return std::nullopt;
}

void validate_layout(const SceneLayout& layout) {
  const int n_rooms = static_cast<int>(layout.rooms.size());
  for (int i = 0; i < n_rooms; ++i) {
    const Room& r = layout.rooms[i];
    const std::string name = "room " + std::to_string(i);
    if (r.floor_polygon.size() < 3) throw ValidationError("floor polygon needs at least 3 vertices", name);
    for (const auto& v : r.floor_polygon)
      if (!v.allFinite()) throw ValidationError("non-finite floor polygon vertex", name);
    if (!std::isfinite(r.floor_z) || !std::isfinite(r.ceiling_z) || !std::isfinite(r.wall_thickness))
      throw ValidationError("non-finite room dimension", name);
    if (!(r.ceiling_z > r.floor_z)) throw ValidationError("ceiling_z must exceed floor_z", name);
    if (!(r.wall_thickness > 0.0)) throw ValidationError("wall_thickness must be positive", name);
    if (std::abs(signed_area(r.floor_polygon)) < 1e-9) throw ValidationError("floor polygon has zero area", name);
    if (!is_simple_polygon(r.floor_polygon)) throw ValidationError("floor polygon is not simple", name);
    for (const auto& o : r.openings) validate_pose(o, name + " opening");
  }

  std::set<std::uint32_t> ids;
  for (const auto& o : layout.objects) {
    const std::string name = object_name(o);
    if (o.instance_id < 1 || o.instance_id >= kStructuralInstanceBase)
      throw ValidationError("instance_id out of range", name);
    if (!ids.insert(o.instance_id).second) throw ValidationError("duplicate instance_id", name);
    if (!is_valid_label(o.semantic_label)) throw ValidationError("semantic_label out of range", name);
    validate_pose(o.pose, name);
    int containing = 0;
    for (const auto& r : layout.rooms)
      if (point_in_polygon(o.pose.position.head<2>(), r.floor_polygon)) ++containing;
    if (containing != 1) throw ValidationError("object center must lie inside exactly one room", name);
  }

  for (const auto& c : layout.connectors) {
    const std::string name = connector_name(c);
    if (c.id < 1 || c.id >= kStructuralInstanceBase) throw ValidationError("connector id out of range", name);
    if (!ids.insert(c.id).second) throw ValidationError("duplicate instance_id", name);
    validate_pose(c.pose, name);
    if (c.room_a < 0 || c.room_a >= n_rooms) throw ValidationError("room_a index out of range", name);
    if (c.room_b && (*c.room_b < 0 || *c.room_b >= n_rooms || *c.room_b == c.room_a))
      throw ValidationError("room_b index invalid", name);
    if (!connector_touches_room(c, layout.rooms[c.room_a]))
      throw ValidationError("connector does not intersect a wall of room_a", name);
    if (c.room_b && !connector_touches_room(c, layout.rooms[*c.room_b]))
      throw ValidationError("connector does not intersect a wall of room_b", name);
  }

  // Rooms are interior-disjoint except inside the footprint of a connector joining them.
  for (int a = 0; a < n_rooms; ++a) {
    for (int b = a + 1; b < n_rooms; ++b) {
      std::vector<Polygon2> allowed;
      for (const auto& c : layout.connectors) {
        if (!c.room_b) continue;
        if ((c.room_a == a && *c.room_b == b) || (c.room_a == b && *c.room_b == a))
          allowed.push_back(box_footprint(c.pose.box()));
      }
      if (overlap_area(layout.rooms[a].floor_polygon, layout.rooms[b].floor_polygon, 1e-3, allowed) > 1e-9)
        throw ValidationError("room floor polygons overlap", "room " + std::to_string(a) + "/" + std::to_string(b));
    }
  }
}

SceneLayout parse_layout(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  SceneLayout layout;
  try {
    layout = layout_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("schema mismatch: ") + e.what());
  }
  validate_layout(layout);
  return layout;
}

std::string serialize_layout(const SceneLayout& layout) { return layout_to_json(layout).dump(2) + "\n"; }

SceneLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open layout file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str());
}

void save_layout(const SceneLayout& layout, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write layout file: " + path.string());
  out << serialize_layout(layout);
}

}  // namespace proxykit
