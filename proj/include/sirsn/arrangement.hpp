#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "sirsn/geometry.hpp"
#include "sirsn/line_process.hpp"

namespace sirsn {

constexpr std::int64_t kWalk = -1;
constexpr std::uint32_t kNone = 0xffffffffu;

// Content key that survives rebuilds: a crossing is (lower line id, higher line id);
// other vertices carry a flag bit in `b` (or in `a` for free-standing terminals).
struct VertexKey {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    static constexpr std::uint64_t kEnd = 1ULL << 63;
    static constexpr std::uint64_t kFoot = 1ULL << 62;
    static constexpr std::uint64_t kTerminal = 1ULL << 63;
    bool operator==(const VertexKey&) const = default;
    auto operator<=>(const VertexKey&) const = default;
};

struct Vertex {
    Vec2 point;
    boost::container::small_vector<std::uint64_t, 2> lines;
    VertexKey key;
};

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::int64_t line = kWalk;
    double length = 0.0;
    double speed = 1.0;
    double time = 0.0;
};

// Part of the process whose lines are only kept inside a tube around a polyline.
struct Corridor {
    double speed_lo = 0.0;  // applies to lines with speed in [speed_lo, speed_hi)
    double speed_hi = 0.0;
    std::vector<Vec2> spine;
    double half_width = 0.0;
};

struct BuildOptions {
    std::size_t max_intersections = 50'000'000;
    std::vector<Corridor> corridors;
};

struct Stop {
    double t = 0.0;
    std::uint32_t vertex = 0;
    std::uint32_t piece = 0;
    std::uint32_t next_edge = kNone;  // edge to the following stop, kNone at a piece end
};

// One line's presence in the graph: its kept arclength intervals and the vertices on it.
struct Track {
    MarkedLine line;
    std::vector<std::pair<double, double>> pieces;
    std::vector<Stop> stops;
};

struct ArrangementGraph {
    Disk clip;
    double epsilon = 0.0;
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<boost::container::small_vector<std::uint32_t, 4>> adjacency;
    std::vector<Track> tracks;  // ordered by line id
    std::vector<std::uint32_t> terminals;
    std::size_t merge_events = 0;
    std::size_t crossings = 0;

    double tolerance() const { return 1e-9 * clip.radius; }
    const Track* track(std::uint64_t line_id) const;
    std::optional<std::uint32_t> find_vertex(const VertexKey& key) const;
    std::uint32_t other(std::uint32_t edge, std::uint32_t vertex) const {
        const Edge& e = edges[edge];
        return e.u == vertex ? e.v : e.u;
    }
};

struct Terminal {
    Vec2 point;
    std::uint32_t vertex = 0;
    std::vector<std::uint32_t> access_edges;
};

ArrangementGraph build(const LineSample& sample, const Disk& clip, const BuildOptions& options = {});

// Adds x to a graph owned by the caller (copy a shared graph first).
Terminal inject_terminal(ArrangementGraph& graph, Vec2 x, double epsilon,
                         std::optional<std::size_t> k_nearest = std::nullopt);

// Arclength intervals of `l` inside the tube of radius w around the polyline.
std::vector<std::pair<double, double>> corridor_intervals(const Line& l, const std::vector<Vec2>& spine,
                                                          double w);

std::string to_json(const ArrangementGraph& g);

}  // namespace sirsn
