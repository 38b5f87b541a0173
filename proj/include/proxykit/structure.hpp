#pragma once

#include "proxykit/layout.hpp"

#include <span>
#include <vector>

namespace proxykit {

/// Uncut wall segment boxes of a room: one per floor-polygon edge, extruded
/// outward by the wall thickness and extended to close the corners.
std::vector<OrientedBox> wall_segments(const Room& room);

/// Splits `wall` into pieces that avoid every cutter box intersecting it.
/// Cutters are treated as rectangles in the wall's (along, up) plane.
std::vector<OrientedBox> cut_wall(const OrientedBox& wall, std::span<const OrientedBox> cutters);

/// All wall-cutting boxes of a layout: connectors plus recorded openings.
std::vector<OrientedBox> wall_cutters(const SceneLayout& layout);

/// Floor/ceiling slab outline: the floor polygon grown by the wall thickness.
Polygon2 slab_outline(const Room& room);

}  // namespace proxykit
