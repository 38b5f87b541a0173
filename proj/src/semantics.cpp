#include "proxykit/semantics.hpp"

#include <array>

namespace proxykit {
namespace {

constexpr std::array<std::string_view, kNumSemanticClasses + 1> kNames = {
    "void",         "wall",          "floor",      "cabinet",        "bed",
    "chair",        "sofa",          "table",      "door",           "window",
    "bookshelf",    "picture",       "counter",    "blinds",         "desk",
    "shelves",      "curtain",       "dresser",    "pillow",         "mirror",
    "floor mat",    "clothes",       "ceiling",    "books",          "refridgerator",
    "television",   "paper",         "towel",      "shower curtain", "box",
    "whiteboard",   "person",        "night stand", "toilet",        "sink",
    "lamp",         "bathtub",       "bag",        "otherstructure", "otherfurniture",
    "otherprop"};

}  // namespace

std::string_view semantic_name(SemanticId id) {
  if (id > kNumSemanticClasses) return "invalid";
  return kNames[id];
}

std::optional<SemanticId> semantic_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<SemanticId>(i);
  }
  return std::nullopt;
}

bool is_structural(SemanticId id) {
  switch (id) {
    case label::kWall:
    case label::kFloor:
    case label::kCeiling:
    case label::kWindow:
    case label::kDoor:
    case label::kMirror:
      return true;
    default:
      return false;
  }
}

bool is_wall_mounted(SemanticId id) {
  return id == label::kWindow || id == label::kDoor || id == label::kPicture ||
         id == label::kMirror;
}

Rgb8 semantic_color(SemanticId id) {
  if (id == label::kVoid) return {0, 0, 0};
  // Deterministic, well-spread hues via a multiplicative hash.
  std::uint32_t h = static_cast<std::uint32_t>(id) * 2654435761u;
  return {static_cast<std::uint8_t>(64 + (h >> 24) % 192),
          static_cast<std::uint8_t>(64 + (h >> 16) % 192),
          static_cast<std::uint8_t>(64 + (h >> 8) % 192)};
}

}  // namespace proxykit
