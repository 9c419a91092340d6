#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sirsn/arrangement.hpp"
#include "sirsn/line_process.hpp"

namespace sirsn {

enum class SegmentKind { Line, Walk };

struct RouteSegment {
    SegmentKind kind = SegmentKind::Walk;
    std::int64_t line = kWalk;
    Vec2 from;
    Vec2 to;
    double speed = 1.0;
    double length = 0.0;
    double time = 0.0;
};

struct Route {
    std::vector<RouteSegment> segments;
    double total_time = 0.0;
    double total_length = 0.0;
    Vec2 start;
    Vec2 end;
    // graph vertex and edge sequence (empty for routes not taken from a graph)
    std::vector<std::uint32_t> vertices;
    std::vector<std::uint32_t> edges;
    bool tie = false;
    std::size_t fallbacks = 0;  // tree nodes closed by walking for want of a line
};

double walk_time(const Route& r);
Vec2 position_at(const Route& r, double t);
// Order-independent sum used for every reported route time.
double canonical_time(std::vector<double> times);

struct RouteOptions {
    bool detect_ties = true;
    double tie_tolerance = 1e-9;
};

Route shortest_time_route(const ArrangementGraph& g, const Terminal& src, const Terminal& dst,
                          const RouteOptions& options = {});
// A distinct route within the relative tolerance of the optimum, if one exists.
std::optional<Route> tied_alternative(const ArrangementGraph& g, const Terminal& src, const Terminal& dst,
                                      const Route& best, double tolerance = 1e-9);

Route tree_upper_bound(Vec2 x1, Vec2 x2, const LineSample& sample, double alpha, int depth, double epsilon);
double tree_alpha_threshold(double gamma);

struct ValidationReport {
    bool clause_a = true;  // LINE segments lie on their lines at the line speed
    bool clause_b = true;  // WALK speeds do not exceed epsilon
    bool clause_c = true;  // total WALK time below epsilon
    bool continuous = true;
    double max_walk_speed = 0.0;
    double walk_time = 0.0;
    double effective_epsilon = 0.0;
    std::vector<std::string> issues;
};

ValidationReport validate_route(const Route& r, const LineSample& sample, double epsilon);

struct ScheduleLevel {
    double v_floor = 1.0;
    double epsilon = 0.05;
    std::optional<std::size_t> k_nearest;
    // lines first admitted at this level are kept only within this distance of the previous
    // level's route, as a multiple of |x1 - x2|; 0 keeps them everywhere
    double corridor = 0.0;
};

struct LevelResult {
    int level = 0;
    double v_floor = 0.0;
    double epsilon = 0.0;
    std::size_t k_nearest = 0;
    double time = 0.0;
    double length = 0.0;
    double walk_time = 0.0;
    std::size_t lines = 0;
    std::size_t vertices = 0;
};

struct ConvergeOptions {
    std::optional<Disk> window;   // default: centred at the midpoint, radius window_factor * |x1 - x2|
    double window_factor = 1.0;
    double min_window_radius = 0.5;
    std::size_t max_intersections = 20'000'000;
    bool keep_routes = false;
};

struct ConvergenceReport {
    std::vector<LevelResult> levels;
    std::vector<Route> routes;  // filled when keep_routes
    std::optional<LineSample> sample;  // last level's sample, filled when keep_routes
    bool stabilized = false;
    bool truncated = false;
    std::string note;
    double estimate = 0.0;
};

std::vector<ScheduleLevel> default_schedule();
void check_schedule(const std::vector<ScheduleLevel>& schedule);
ConvergenceReport converge(Vec2 x1, Vec2 x2, const ProcessParams& params, const std::vector<ScheduleLevel>& schedule,
                           const ConvergeOptions& options = {});

std::string to_json(const Route& r);
std::string to_csv(const ConvergenceReport& c);

}  // namespace sirsn
