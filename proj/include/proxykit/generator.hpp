#pragma once

#include "proxykit/layout.hpp"

#include <cstdint>
#include <vector>

namespace proxykit {

/// Parameters of the procedural single-room layout generator.
struct GenSpec {
  double room_extent_min = 4.0;  // meters, per horizontal side
  double room_extent_max = 7.0;
  double ceiling_min = 2.6;
  double ceiling_max = 3.0;
  double wall_thickness = 0.15;
  int object_count_min = 3;
  int object_count_max = 8;
  std::vector<SemanticId> allowed_labels = {
      label::kCabinet, label::kBed,    label::kChair,  label::kSofa,      label::kTable,
      label::kBookshelf, label::kDesk, label::kDresser, label::kNightStand, label::kLamp,
      label::kOtherFurniture, label::kWindow, label::kPicture, label::kMirror};
  /// Rejection-sampling attempts per object before giving up.
  int max_attempts = 200;
  /// Minimum gap kept between generated objects.
  double object_gap = 0.02;
};

/// Deterministic layout for (seed, spec): one rectangular room centered at
/// the origin with floor at z = 0, objects resting on the floor or mounted on
/// walls, no interpenetration. Throws GenerationError when fewer than
/// object_count_min objects can be placed.
SceneLayout generate_layout(std::uint64_t seed, const GenSpec& spec = {});

/// Nominal (width, depth, height) of a class, meters.
Vec3 nominal_object_size(SemanticId label);

}  // namespace proxykit
