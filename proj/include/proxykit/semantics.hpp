#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace proxykit {

/// NYUv2 40-class label id; 0 is void (unobserved / no hit).
using SemanticId = std::uint16_t;

namespace label {
inline constexpr SemanticId kVoid = 0;
inline constexpr SemanticId kWall = 1;
inline constexpr SemanticId kFloor = 2;
inline constexpr SemanticId kCabinet = 3;
inline constexpr SemanticId kBed = 4;
inline constexpr SemanticId kChair = 5;
inline constexpr SemanticId kSofa = 6;
inline constexpr SemanticId kTable = 7;
inline constexpr SemanticId kDoor = 8;
inline constexpr SemanticId kWindow = 9;
inline constexpr SemanticId kBookshelf = 10;
inline constexpr SemanticId kPicture = 11;
inline constexpr SemanticId kDesk = 14;
inline constexpr SemanticId kDresser = 17;
inline constexpr SemanticId kMirror = 19;
inline constexpr SemanticId kCeiling = 22;
inline constexpr SemanticId kNightStand = 32;
inline constexpr SemanticId kLamp = 35;
inline constexpr SemanticId kOtherFurniture = 39;
}  // namespace label

inline constexpr int kNumSemanticClasses = 40;

std::string_view semantic_name(SemanticId id);
std::optional<SemanticId> semantic_from_name(std::string_view name);
inline bool is_valid_label(int id) { return id >= 1 && id <= kNumSemanticClasses; }

/// wall, floor, ceiling, window, door, mirror.
bool is_structural(SemanticId id);

/// Classes exempt from the floor-contact rule (window, door, picture, mirror).
bool is_wall_mounted(SemanticId id);

/// Fixed RGB palette entry used for paletted semantic PNGs.
struct Rgb8 {
  std::uint8_t r, g, b;
};
Rgb8 semantic_color(SemanticId id);

}  // namespace proxykit
