#pragma once

#include <optional>
#include <vector>

#include "sirsn/geodesics.hpp"

namespace sirsn {

struct Box {
    Vec2 lo;
    Vec2 hi;
    double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
    Vec2 center() const { return (lo + hi) * 0.5; }
    bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

// Parameter range in [0,1] of segment a->b inside the box.
std::optional<std::pair<double, double>> clip_segment(Vec2 a, Vec2 b, const Box& box);

struct UnionLength {
    double union_length = 0.0;   // covered by at least one route
    double shared_length = 0.0;  // covered by at least two routes
    double sum_length = 0.0;     // plain sum over routes
};

// Length of the union of route segments, de-duplicated per supporting line by interval union.
// LINE segments are placed on their sample line; WALK segments are matched by their end points.
UnionLength route_union(const std::vector<Route>& routes, const LineSample* sample,
                        const std::optional<Box>& window = std::nullopt);

}  // namespace sirsn
