#pragma once

#include "proxykit/geometry.hpp"

#include <span>
#include <vector>

namespace proxykit {

using Polygon2 = std::vector<Vec2>;

/// Signed area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> poly);

/// Even-odd point-in-polygon test (boundary points may go either way).
bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly);

/// Distance from p to the nearest polygon edge.
double distance_to_boundary(const Vec2& p, std::span<const Vec2> poly);

/// Closest point on the polygon boundary.
Vec2 closest_boundary_point(const Vec2& p, std::span<const Vec2> poly);

Vec2 area_centroid(std::span<const Vec2> poly);

/// True when the ring has no self-intersections (Boost.Geometry).
bool is_simple_polygon(std::span<const Vec2> poly);

/// Area of the interior overlap of two polygons after shrinking each by
/// `shrink` and removing the given exclusion footprints.
double overlap_area(std::span<const Vec2> a, std::span<const Vec2> b, double shrink,
                    std::span<const Polygon2> exclusions = {});

/// Polygon grown outward by `distance` with mitred corners.
Polygon2 inflate_polygon(std::span<const Vec2> poly, double distance);

/// XY footprint of a box as a 4-vertex CCW polygon.
Polygon2 box_footprint(const OrientedBox& box);

}  // namespace proxykit
