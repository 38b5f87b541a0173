#pragma once

#include "proxykit/layout.hpp"
#include "proxykit/point_cloud.hpp"

namespace proxykit {

/// Merges `addition` into `base` through the dangling connector `connector_id`.
/// The world frame is left untouched: base entities keep their exact poses.
/// A temporary-wall connector is removed and recorded as a wall opening on
/// both joined rooms; a door is kept and its room_b set.
/// Throws UnknownId, or ExpansionError on overlap (beyond 1 mm), id clashes,
/// a non-dangling connector, or an addition that does not meet the connector.
SceneLayout expand_layout(const SceneLayout& base, const SceneLayout& addition, std::uint32_t connector_id);

/// Drops points labeled with the connector's instance id and unlabeled
/// points (instance 0 or no instance channel) inside its box grown by 1 cm.
/// Order of the remaining points is preserved.
PointCloud remove_labeled_points(const PointCloud& cloud, const SceneLayout& layout, std::uint32_t connector_id);

}  // namespace proxykit
