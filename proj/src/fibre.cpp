#include "sirsn/fibre.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace sirsn {

std::optional<std::pair<double, double>> clip_segment(Vec2 a, Vec2 b, const Box& box) {
    double t0 = 0.0, t1 = 1.0;
    Vec2 d = b - a;
    auto edge = [&](double p, double q) {
        if (p == 0) return q >= 0;
        double r = q / p;
        if (p < 0) {
            if (r > t1) return false;
            t0 = std::max(t0, r);
        } else {
            if (r < t0) return false;
            t1 = std::min(t1, r);
        }
        return true;
    };
    if (edge(-d.x, a.x - box.lo.x) && edge(d.x, box.hi.x - a.x) && edge(-d.y, a.y - box.lo.y) &&
        edge(d.y, box.hi.y - a.y) && t0 <= t1)
        return std::make_pair(t0, t1);
    return std::nullopt;
}

UnionLength route_union(const std::vector<Route>& routes, const LineSample* sample, const std::optional<Box>& window) {
    // key: (0, line id, 0, 0, 0) for lines, (1, ax, ay, bx, by) for walks with sorted end points
    using Key = std::tuple<int, std::int64_t, double, double, double, double>;
    std::map<Key, std::vector<std::pair<double, double>>> spans;
    UnionLength out;
    for (const auto& r : routes) {
        for (const auto& s : r.segments) {
            Vec2 a = s.from, b = s.to;
            double f0 = 0.0, f1 = 1.0;
            if (window) {
                auto c = clip_segment(a, b, *window);
                if (!c) continue;
                std::tie(f0, f1) = *c;
            }
            Vec2 ca = a + (b - a) * f0, cb = a + (b - a) * f1;
            out.sum_length += s.length * (f1 - f0);
            if (s.kind == SegmentKind::Line) {
                const MarkedLine* m = sample ? sample->find(static_cast<std::uint64_t>(s.line)) : nullptr;
                Line l = m ? m->line : Line::through(a, b);
                double t0 = l.param(ca), t1 = l.param(cb);
                if (t0 > t1) std::swap(t0, t1);
                spans[{0, s.line, 0, 0, 0, 0}].emplace_back(t0, t1);
            } else {
                Vec2 p = a, q = b;
                if (std::tie(q.x, q.y) < std::tie(p.x, p.y)) std::swap(p, q);
                double len = dist(p, q);
                double t0 = dist(p, ca), t1 = dist(p, cb);
                if (t0 > t1) std::swap(t0, t1);
                spans[{1, 0, p.x, p.y, q.x, q.y}].emplace_back(std::min(t0, len), std::min(t1, len));
            }
        }
    }
    for (auto& [key, iv] : spans) {
        std::vector<std::pair<double, int>> ev;
        for (auto [lo, hi] : iv) {
            if (!(hi > lo)) continue;
            ev.emplace_back(lo, +1);
            ev.emplace_back(hi, -1);
        }
        std::sort(ev.begin(), ev.end());
        int cover = 0;
        double last = 0.0;
        for (auto [x, d] : ev) {
            if (cover >= 1) out.union_length += x - last;
            if (cover >= 2) out.shared_length += x - last;
            cover += d;
            last = x;
        }
    }
    return out;
}

}  // namespace sirsn
