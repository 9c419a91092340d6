#pragma once

#include <cmath>

#include "sirsn/arrangement.hpp"
#include "sirsn/geodesics.hpp"

namespace fixture {

using namespace sirsn;

// Three unit-speed lines through the sides of an equilateral triangle of side 1 centred at the
// origin, nothing else; routes from a corner to the midpoint of the opposite side.
struct Triangle {
    LineSample sample;
    Vec2 corner, midpoint;
};

inline Triangle triangle(double speed_delta = 0.0) {
    const double R = 1 / std::sqrt(3.0);  // circumradius
    Vec2 p[3];
    for (int i = 0; i < 3; ++i) {
        double a = kPi / 2 + 2 * kPi * i / 3;
        p[i] = {R * std::cos(a), R * std::sin(a)};
    }
    Triangle t;
    t.sample.params.gamma = 3;
    t.sample.window = Disk{{0, 0}, 2};
    t.sample.v_floor = 0.5;
    t.sample.lines = {{Line::through(p[0], p[1]), 1.0 + speed_delta, 0},
                      {Line::through(p[1], p[2]), 1.0, 1},
                      {Line::through(p[2], p[0]), 1.0, 2}};
    t.sample.next_id = 3;
    t.corner = p[0];
    t.midpoint = (p[1] + p[2]) * 0.5;
    return t;
}

struct TriangleRun {
    Route route;
    std::optional<Route> other;
};

inline TriangleRun run_triangle(double speed_delta = 0.0) {
    Triangle t = triangle(speed_delta);
    ArrangementGraph g = build(t.sample, t.sample.window);
    Terminal a = inject_terminal(g, t.corner, 0.01);
    Terminal b = inject_terminal(g, t.midpoint, 0.01);
    TriangleRun out;
    out.route = shortest_time_route(g, a, b);
    out.other = tied_alternative(g, a, b, out.route);
    return out;
}

}  // namespace fixture
