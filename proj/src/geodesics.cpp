#include "sirsn/geodesics.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <unordered_set>

#include <fmt/format.h>

#include "sirsn/io.hpp"

namespace sirsn {

double canonical_time(std::vector<double> times) {
    std::sort(times.begin(), times.end());
    double s = 0.0;
    for (double t : times) s += t;
    return s;
}

double walk_time(const Route& r) {
    double s = 0.0;
    for (const auto& seg : r.segments)
        if (seg.kind == SegmentKind::Walk) s += seg.time;
    return s;
}

Vec2 position_at(const Route& r, double t) {
    if (t <= 0 || r.segments.empty()) return r.start;
    double acc = 0.0;
    for (const auto& seg : r.segments) {
        if (t <= acc + seg.time) {
            double f = seg.time > 0 ? (t - acc) / seg.time : 1.0;
            return seg.from + (seg.to - seg.from) * f;
        }
        acc += seg.time;
    }
    return r.segments.back().to;
}

namespace {

struct Search {
    std::vector<double> d;
    std::vector<std::uint32_t> hops;
    std::vector<std::uint32_t> pred;  // edge into the vertex
};

std::vector<std::uint32_t> vertex_path(const ArrangementGraph& g, const Search& s, std::uint32_t v) {
    std::vector<std::uint32_t> p{v};
    while (s.pred[v] != kNone) {
        v = g.other(s.pred[v], v);
        p.push_back(v);
    }
    std::reverse(p.begin(), p.end());
    return p;
}

// Shortest paths from src; stops once `target` is settled or distances exceed `bound`.
Search dijkstra(const ArrangementGraph& g, std::uint32_t src, std::uint32_t target, double bound) {
    const std::size_t n = g.vertices.size();
    Search s{std::vector<double>(n, INFINITY), std::vector<std::uint32_t>(n, kNone),
             std::vector<std::uint32_t>(n, kNone)};
    std::vector<char> done(n, 0);
    using Item = std::tuple<double, std::uint32_t, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    s.d[src] = 0.0;
    s.hops[src] = 0;
    pq.emplace(0.0, 0u, src);
    while (!pq.empty()) {
        auto [d, h, u] = pq.top();
        pq.pop();
        if (done[u] || d != s.d[u] || h != s.hops[u]) continue;
        if (d > bound) break;
        done[u] = 1;
        if (u == target) break;
        for (std::uint32_t e : g.adjacency[u]) {
            std::uint32_t w = g.other(e, u);
            if (done[w]) continue;
            double nd = d + g.edges[e].time;
            std::uint32_t nh = h + 1;
            bool better = nd < s.d[w];
            if (!better && nd == s.d[w]) {
                if (nh < s.hops[w])
                    better = true;
                else if (nh == s.hops[w]) {
                    auto a = vertex_path(g, s, u);
                    auto b = vertex_path(g, s, g.other(s.pred[w], w));
                    better = a < b;
                }
            }
            if (better) {
                s.d[w] = nd;
                s.hops[w] = nh;
                s.pred[w] = e;
                pq.emplace(nd, nh, w);
            }
        }
    }
    return s;
}

Route make_route(const ArrangementGraph& g, Vec2 start, Vec2 end, const std::vector<std::uint32_t>& verts,
                 const std::vector<std::uint32_t>& edges) {
    Route r;
    r.start = start;
    r.end = end;
    r.vertices = verts;
    r.edges = edges;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = g.edges[edges[k]];
        Vec2 a = g.vertices[verts[k]].point, b = g.vertices[verts[k + 1]].point;
        if (!r.segments.empty() && e.line != kWalk && r.segments.back().line == e.line) {
            r.segments.back().to = b;
            continue;
        }
        r.segments.push_back({e.line == kWalk ? SegmentKind::Walk : SegmentKind::Line, e.line, a, b, e.speed,
                              e.length, e.time});
    }
    // a run along one line is timed end to end, so extra crossings on it (a refined sample) change nothing
    std::vector<double> times;
    for (auto& seg : r.segments) {
        if (seg.kind == SegmentKind::Line) {
            seg.length = dist(seg.from, seg.to);
            seg.time = seg.length / seg.speed;
        }
        times.push_back(seg.time);
        r.total_length += seg.length;
    }
    r.total_time = canonical_time(std::move(times));
    return r;
}

std::vector<std::uint32_t> edge_path(const ArrangementGraph& g, const Search& s, std::uint32_t v) {
    std::vector<std::uint32_t> p;
    while (s.pred[v] != kNone) {
        p.push_back(s.pred[v]);
        v = g.other(s.pred[v], v);
    }
    std::reverse(p.begin(), p.end());
    return p;
}

}  // namespace

std::optional<Route> tied_alternative(const ArrangementGraph& g, const Terminal& src, const Terminal& dst,
                                      const Route& best, double tolerance) {
    if (src.vertex == dst.vertex) return std::nullopt;
    const double bound = best.total_time * (1 + tolerance);
    Search fs = dijkstra(g, src.vertex, kNone, bound);
    Search bs = dijkstra(g, dst.vertex, kNone, bound);
    std::unordered_set<std::uint32_t> on_path(best.edges.begin(), best.edges.end());
    for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
        if (on_path.count(e)) continue;
        const Edge& ed = g.edges[e];
        for (int orient = 0; orient < 2; ++orient) {
            std::uint32_t a = orient ? ed.v : ed.u, b = orient ? ed.u : ed.v;
            if (!(fs.d[a] + ed.time + bs.d[b] <= bound)) continue;
            // src ~> a -> b ~> dst, with any loop cut out
            std::vector<std::uint32_t> ev = edge_path(g, fs, a);
            ev.push_back(e);
            auto tail = edge_path(g, bs, b);
            ev.insert(ev.end(), tail.rbegin(), tail.rend());
            std::vector<std::uint32_t> vs{src.vertex}, es;
            for (std::uint32_t x : ev) {
                std::uint32_t nxt = g.other(x, vs.back());
                auto seen = std::find(vs.begin(), vs.end(), nxt);
                if (seen != vs.end()) {
                    auto keep = static_cast<std::size_t>(seen - vs.begin());
                    vs.resize(keep + 1);
                    es.resize(keep);
                } else {
                    vs.push_back(nxt);
                    es.push_back(x);
                }
            }
            if (es == best.edges) continue;
            Route r = make_route(g, src.point, dst.point, vs, es);
            if (r.total_time <= bound) return r;
        }
    }
    return std::nullopt;
}

Route shortest_time_route(const ArrangementGraph& g, const Terminal& src, const Terminal& dst,
                          const RouteOptions& options) {
    if (src.vertex >= g.vertices.size() || dst.vertex >= g.vertices.size())
        throw std::invalid_argument("shortest_time_route: terminal not in graph");
    if (src.vertex == dst.vertex) {
        Route r;
        r.start = src.point;
        r.end = dst.point;
        r.vertices = {src.vertex};
        return r;
    }
    Search s = dijkstra(g, src.vertex, dst.vertex, INFINITY);
    if (!std::isfinite(s.d[dst.vertex])) throw std::runtime_error("shortest_time_route: terminals are disconnected");
    Route r = make_route(g, src.point, dst.point, vertex_path(g, s, dst.vertex), edge_path(g, s, dst.vertex));
    if (options.detect_ties) r.tie = tied_alternative(g, src, dst, r, options.tie_tolerance).has_value();
    return r;
}

double tree_alpha_threshold(double gamma) { return std::pow(2.0, (gamma - 1) / (gamma - 2)); }

namespace {

struct TreeBuilder {
    const LineSample& sample;
    double alpha;
    int depth;
    double eps;
    Route route;

    void walk(Vec2 a, Vec2 b) {
        double len = dist(a, b);
        if (len == 0) return;
        route.segments.push_back({SegmentKind::Walk, kWalk, a, b, eps, len, len / eps});
    }

    void node(Vec2 a, Vec2 b, int level) {
        double r = dist(a, b);
        if (r == 0) return;
        if (level >= depth) return walk(a, b);
        double rho = r / alpha;
        const MarkedLine* best = nullptr;
        for (const auto& m : sample.lines)
            if (m.line.distance(a) <= rho && m.line.distance(b) <= rho && (!best || m.v > best->v)) best = &m;
        if (!best) {
            ++route.fallbacks;
            return walk(a, b);
        }
        Vec2 pa = best->line.project(a), pb = best->line.project(b);
        node(a, pa, level + 1);
        double len = dist(pa, pb);
        if (len > 0)
            route.segments.push_back({SegmentKind::Line, static_cast<std::int64_t>(best->id), pa, pb, best->v, len,
                                      len / best->v});
        node(pb, b, level + 1);
    }
};

}  // namespace

Route tree_upper_bound(Vec2 x1, Vec2 x2, const LineSample& sample, double alpha, int depth, double epsilon) {
    if (!(alpha > tree_alpha_threshold(sample.params.gamma)))
        throw std::invalid_argument(
            fmt::format("tree_upper_bound: alpha must exceed {}", tree_alpha_threshold(sample.params.gamma)));
    if (x1 == x2) throw std::invalid_argument("tree_upper_bound: endpoints coincide");
    if (depth < 0 || !(epsilon > 0)) throw std::invalid_argument("tree_upper_bound: bad depth or epsilon");
    TreeBuilder tb{sample, alpha, depth, epsilon, {}};
    tb.route.start = x1;
    tb.route.end = x2;
    tb.node(x1, x2, 0);
    std::vector<double> times;
    for (const auto& s : tb.route.segments) {
        times.push_back(s.time);
        tb.route.total_length += s.length;
    }
    tb.route.total_time = canonical_time(std::move(times));
    return tb.route;
}

ValidationReport validate_route(const Route& r, const LineSample& sample, double epsilon) {
    ValidationReport rep;
    const double tol = 1e-9 * std::max(1.0, sample.window.radius);
    Vec2 at = r.start;
    for (std::size_t k = 0; k < r.segments.size(); ++k) {
        const auto& s = r.segments[k];
        double scale = std::max({1.0, norm(s.from), norm(at)});
        if (dist(s.from, at) > 1e-9 * scale) {
            rep.continuous = false;
            rep.issues.push_back(fmt::format("segment {} does not start where the previous one ends", k));
        }
        at = s.to;
        if (s.kind == SegmentKind::Line) {
            const MarkedLine* m = s.line >= 0 ? sample.find(static_cast<std::uint64_t>(s.line)) : nullptr;
            if (!m) {
                rep.clause_a = false;
                rep.issues.push_back(fmt::format("segment {} uses unknown line {}", k, s.line));
                continue;
            }
            if (m->line.distance(s.from) > tol || m->line.distance(s.to) > tol) {
                rep.clause_a = false;
                rep.issues.push_back(fmt::format("segment {} leaves line {}", k, s.line));
            }
            if (s.speed > m->v * (1 + 1e-12)) {
                rep.clause_a = false;
                rep.issues.push_back(fmt::format("segment {} exceeds the speed of line {}", k, s.line));
            }
        } else {
            rep.max_walk_speed = std::max(rep.max_walk_speed, s.speed);
            rep.walk_time += s.time;
            if (s.speed > epsilon) {
                rep.clause_b = false;
                rep.issues.push_back(fmt::format("segment {} walks at {} above epsilon", k, s.speed));
            }
        }
    }
    if (!r.segments.empty() && dist(at, r.end) > 1e-9 * std::max(1.0, norm(r.end))) {
        rep.continuous = false;
        rep.issues.push_back("route does not finish at its end point");
    }
    rep.clause_c = rep.walk_time < epsilon;
    if (!rep.clause_c) rep.issues.push_back(fmt::format("total walk time {} is not below epsilon", rep.walk_time));
    rep.effective_epsilon = std::max(rep.max_walk_speed, rep.walk_time);
    return rep;
}

std::vector<ScheduleLevel> default_schedule() {
    std::vector<ScheduleLevel> s;
    for (int k = 0; k <= 4; ++k) {
        ScheduleLevel l;
        l.v_floor = std::ldexp(1.0, -k);
        l.epsilon = 0.05 * std::pow(0.003 / 0.05, k / 4.0);
        l.k_nearest = std::size_t{16} << k;
        l.corridor = k == 0 ? 0.0 : 0.1;
        s.push_back(l);
    }
    s.back().epsilon = 0.003;
    return s;
}

void check_schedule(const std::vector<ScheduleLevel>& schedule) {
    if (schedule.empty()) throw std::invalid_argument("schedule is empty");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& l = schedule[k];
        if (!(l.v_floor > 0) || !(l.epsilon > 0)) throw std::invalid_argument("schedule values must be positive");
        if (k == 0) continue;
        const auto& p = schedule[k - 1];
        if (l.v_floor > p.v_floor || l.epsilon > p.epsilon ||
            (l.v_floor == p.v_floor && l.epsilon == p.epsilon))
            throw std::invalid_argument(fmt::format("schedule level {} does not refine level {}", k, k - 1));
    }
}

ConvergenceReport converge(Vec2 x1, Vec2 x2, const ProcessParams& params, const std::vector<ScheduleLevel>& schedule,
                           const ConvergeOptions& options) {
    params.validate();
    check_schedule(schedule);
    const double sep = dist(x1, x2);
    Disk window = options.window.value_or(
        Disk{(x1 + x2) * 0.5, std::max(options.min_window_radius, options.window_factor * sep)});

    ConvergenceReport rep;
    std::optional<LineSample> s;
    BuildOptions bo;
    bo.max_intersections = options.max_intersections;
    std::vector<Vec2> spine;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& lv = schedule[k];
        try {
            if (!s)
                s = sample(params, window, lv.v_floor);
            else if (lv.v_floor < s->v_floor) {
                double prev = s->v_floor;
                s = refine(*s, lv.v_floor);
                if (lv.corridor > 0 && !spine.empty())
                    bo.corridors.push_back({lv.v_floor, prev, spine, lv.corridor * std::max(sep, 1e-12)});
            }
            ArrangementGraph g = build(*s, window, bo);
            Terminal a = inject_terminal(g, x1, lv.epsilon, lv.k_nearest);
            Terminal b = inject_terminal(g, x2, lv.epsilon, lv.k_nearest);
            Route r = shortest_time_route(g, a, b, {false, 1e-9});
            std::size_t k_used = lv.k_nearest.value_or(g.tracks.size() <= 64 ? g.tracks.size() : 64);
            rep.levels.push_back({static_cast<int>(k), lv.v_floor, lv.epsilon, std::min(k_used, g.tracks.size()),
                                  r.total_time, r.total_length, walk_time(r), s->lines.size(), g.vertices.size()});
            spine.assign({r.start});
            for (const auto& seg : r.segments) spine.push_back(seg.to);
            if (options.keep_routes) rep.routes.push_back(std::move(r));
        } catch (const ResourceCapError& e) {
            rep.truncated = true;
            rep.note = fmt::format("truncated at level {}: {}", k, e.what());
            break;
        }
    }
    if (options.keep_routes && !rep.levels.empty()) rep.sample = s;
    if (!rep.levels.empty()) rep.estimate = rep.levels.back().time;
    if (rep.levels.size() >= 2) {
        double a = rep.levels[rep.levels.size() - 2].time, b = rep.levels.back().time;
        rep.stabilized = a == b || std::abs(a - b) < 0.01 * std::max(a, b);
    }
    return rep;
}

std::string to_json(const Route& r) {
    nlohmann::json j;
    j["start"] = {r.start.x, r.start.y};
    j["end"] = {r.end.x, r.end.y};
    j["total_time"] = r.total_time;
    j["total_length"] = r.total_length;
    j["tie"] = r.tie;
    auto& segs = j["segments"] = nlohmann::json::array();
    for (const auto& s : r.segments) {
        nlohmann::json kind = s.kind == SegmentKind::Walk ? nlohmann::json("WALK") : nlohmann::json(s.line);
        segs.push_back({{"line", kind}, {"from", {s.from.x, s.from.y}}, {"to", {s.to.x, s.to.y}},
                        {"speed", s.speed}, {"length", s.length}, {"time", s.time}});
    }
    return io::dump_json(j);
}

std::string to_csv(const ConvergenceReport& c) {
    std::string out = "level,v_floor,epsilon,time,length,walk_time\n";
    for (const auto& l : c.levels)
        out += fmt::format("{},{},{},{},{},{}\n", l.level, io::format_double(l.v_floor), io::format_double(l.epsilon),
                           io::format_double(l.time), io::format_double(l.length), io::format_double(l.walk_time));
    return out;
}

}  // namespace sirsn
