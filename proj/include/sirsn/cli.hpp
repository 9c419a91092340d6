#pragma once

#include <string>
#include <vector>

#include "sirsn/geodesics.hpp"

namespace sirsn::cli {

// Lines of the sample clipped to the view disk, routes drawn on top (WALK dashed).
std::string render_svg(const LineSample& sample, const Disk& view, const std::vector<Route>& routes = {},
                       const std::vector<Vec2>& points = {});
// Routes only, shaded by speed.
std::string render_routes_svg(const std::vector<Route>& routes, const Disk& view, double v_floor,
                              const std::vector<Vec2>& points = {});

// Exit codes: 0 ok, 2 usage, 3 resource cap, 4 I/O, 1 anything else.
int run(int argc, char** argv);

}  // namespace sirsn::cli
