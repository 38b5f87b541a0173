#include "proxykit/point_cloud.hpp"

#include "proxykit/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace proxykit {

void PointCloud::check() const {
  const auto bad = [&](std::size_t n) { return n != 0 && n != size(); };
  if (bad(colors.size()) || bad(semantic.size()) || bad(instance.size()))
    throw ShapeMismatch("point cloud attribute length differs from point count");
  for (const Vec3& p : positions)
    if (!p.allFinite()) throw DimensionError("point cloud has non-finite positions");
}

namespace {

template <class T>
void append_attr(std::vector<T>& dst, std::size_t dst_size, const std::vector<T>& src, std::size_t src_size) {
  if (dst.empty() && src.empty()) return;
  if (dst.empty()) dst.assign(dst_size, T{});
  if (src.empty()) {
    dst.resize(dst_size + src_size, T{});
  } else {
    dst.insert(dst.end(), src.begin(), src.end());
  }
}

template <class T>
std::vector<T> pick(const std::vector<T>& src, const std::vector<std::size_t>& idx) {
  if (src.empty()) return {};
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(src[i]);
  return out;
}

template <class T>
void put(std::string& buf, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <class T>
T get(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

std::uint8_t to_u8(float c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0f, 1.0f) * 255.0f)); }

}  // namespace

void PointCloud::append(const PointCloud& other) {
  const std::size_t n = size(), m = other.size();
  append_attr(colors, n, other.colors, m);
  append_attr(semantic, n, other.semantic, m);
  append_attr(instance, n, other.instance, m);
  positions.insert(positions.end(), other.positions.begin(), other.positions.end());
}

PointCloud PointCloud::select(const std::vector<std::size_t>& indices) const {
  PointCloud out;
  out.positions = pick(positions, indices);
  out.colors = pick(colors, indices);
  out.semantic = pick(semantic, indices);
  out.instance = pick(instance, indices);
  return out;
}

void write_ply(const PointCloud& cloud, const std::filesystem::path& path) {
  cloud.check();
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
         << "\nproperty float x\nproperty float y\nproperty float z\n"
            "property uchar red\nproperty uchar green\nproperty uchar blue\n"
            "property ushort semantic\nproperty uint instance\nend_header\n";
  std::string body = header.str();
  body.reserve(body.size() + cloud.size() * 21);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    put(body, static_cast<float>(p.x()));
    put(body, static_cast<float>(p.y()));
    put(body, static_cast<float>(p.z()));
    const Eigen::Vector3f c = cloud.has_colors() ? cloud.colors[i] : Eigen::Vector3f::Zero();
    put(body, to_u8(c.x()));
    put(body, to_u8(c.y()));
    put(body, to_u8(c.z()));
    put(body, cloud.has_semantic() ? cloud.semantic[i] : SemanticId{0});
    put(body, cloud.has_instance() ? cloud.instance[i] : std::uint32_t{0});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  const std::string end_marker = "end_header\n";
  const auto end = data.find(end_marker);
  if (data.rfind("ply\n", 0) != 0 || end == std::string::npos) throw IoError("not a PLY file: " + path.string());

  std::istringstream header(data.substr(0, end));
  std::string line;
  std::size_t count = 0;
  std::vector<std::string> props;
  bool binary_le = false;
  while (std::getline(header, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (kw == "element") {
      std::string name;
      ls >> name >> count;
    } else if (kw == "property") {
      std::string type, name;
      ls >> type >> name;
      props.push_back(type + " " + name);
    }
  }
  const std::vector<std::string> expected = {"float x",      "float y",      "float z",         "uchar red",
                                             "uchar green",  "uchar blue",   "ushort semantic", "uint instance"};
  if (!binary_le || props != expected) throw IoError("unsupported PLY layout: " + path.string());
  const std::size_t body = end + end_marker.size();
  if (data.size() < body + count * 21) throw IoError("truncated PLY: " + path.string());

  PointCloud cloud;
  cloud.positions.reserve(count);
  const char* p = data.data() + body;
  for (std::size_t i = 0; i < count; ++i) {
    const float x = get<float>(p), y = get<float>(p), z = get<float>(p);
    const auto r = get<std::uint8_t>(p), g = get<std::uint8_t>(p), b = get<std::uint8_t>(p);
    cloud.positions.emplace_back(x, y, z);
    cloud.colors.emplace_back(r / 255.0f, g / 255.0f, b / 255.0f);
    cloud.semantic.push_back(get<SemanticId>(p));
    cloud.instance.push_back(get<std::uint32_t>(p));
  }
  return cloud;
}

}  // namespace proxykit
