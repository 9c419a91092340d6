#include "sirsn/arrangement.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "sirsn/io.hpp"

namespace sirsn {

const Track* ArrangementGraph::track(std::uint64_t line_id) const {
    auto it = std::lower_bound(tracks.begin(), tracks.end(), line_id,
                               [](const Track& t, std::uint64_t id) { return t.line.id < id; });
    return it != tracks.end() && it->line.id == line_id ? &*it : nullptr;
}

std::optional<std::uint32_t> ArrangementGraph::find_vertex(const VertexKey& key) const {
    for (std::uint32_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].key == key) return i;
    return std::nullopt;
}

namespace {

using Interval = std::pair<double, double>;

std::optional<Interval> disk_interval(const Line& l, Vec2 c, double w) {
    double h = l.signed_distance(c);
    if (std::abs(h) > w) return std::nullopt;
    double half = std::sqrt(w * w - h * h);
    double t = l.param(c);
    return Interval{t - half, t + half};
}

// {t : lo <= alpha + beta t <= hi} intersected into [a, b]
bool clip_linear(double alpha, double beta, double lo, double hi, double& a, double& b) {
    if (beta == 0) return alpha >= lo && alpha <= hi;
    double t1 = (lo - alpha) / beta, t2 = (hi - alpha) / beta;
    if (t1 > t2) std::swap(t1, t2);
    a = std::max(a, t1);
    b = std::min(b, t2);
    return a <= b;
}

std::optional<Interval> capsule_interval(const Line& l, Vec2 p, Vec2 q, double w) {
    std::optional<Interval> out;
    auto add = [&](Interval iv) {
        if (!out) out = iv;
        else out = Interval{std::min(out->first, iv.first), std::max(out->second, iv.second)};
    };
    if (auto iv = disk_interval(l, p, w)) add(*iv);
    if (auto iv = disk_interval(l, q, w)) add(*iv);
    double len = dist(p, q);
    if (len > 0) {
        Vec2 u = (q - p) / len, n{-u.y, u.x};
        Vec2 base = l.point_at(0.0) - p, d = l.direction();
        double a = -1e300, b = 1e300;
        if (clip_linear(dot(base, u), dot(d, u), 0.0, len, a, b) &&
            clip_linear(dot(base, n), dot(d, n), -w, w, a, b))
            add({a, b});
    }
    return out;
}

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end());
    std::vector<Interval> out;
    for (auto iv : v) {
        if (!out.empty() && iv.first <= out.back().second)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

struct Candidate {
    Vec2 p;
    std::uint32_t ti, tj;  // tracks; tj == kNone for a piece end
    double si, sj;         // arclength on each track
    std::uint32_t pi, pj;  // piece on each track
    std::uint32_t end;     // piece end index for boundary candidates
};

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a > b) std::swap(a, b);
        parent[b] = a;
        return true;
    }
};

std::uint32_t piece_of(const std::vector<Interval>& pieces, double t, double tol) {
    for (std::uint32_t q = 0; q < pieces.size(); ++q)
        if (t >= pieces[q].first - tol && t <= pieces[q].second + tol) return q;
    return kNone;
}

std::uint32_t add_edge(ArrangementGraph& g, std::uint32_t u, std::uint32_t v, std::int64_t line, double length,
                       double speed) {
    auto id = static_cast<std::uint32_t>(g.edges.size());
    g.edges.push_back({u, v, line, length, speed, length / speed});
    g.adjacency[u].push_back(id);
    g.adjacency[v].push_back(id);
    return id;
}

std::uint32_t add_vertex(ArrangementGraph& g, Vec2 p, VertexKey key) {
    auto id = static_cast<std::uint32_t>(g.vertices.size());
    g.vertices.push_back({p, {}, key});
    g.adjacency.emplace_back();
    return id;
}

}  // namespace

std::vector<std::pair<double, double>> corridor_intervals(const Line& l, const std::vector<Vec2>& spine, double w) {
    std::vector<Interval> parts;
    if (spine.size() == 1) {
        if (auto iv = disk_interval(l, spine[0], w)) parts.push_back(*iv);
    }
    for (std::size_t k = 0; k + 1 < spine.size(); ++k)
        if (auto iv = capsule_interval(l, spine[k], spine[k + 1], w)) parts.push_back(*iv);
    return merge_intervals(std::move(parts));
}

ArrangementGraph build(const LineSample& sample, const Disk& clip, const BuildOptions& options) {
    validate(ConvexBody{clip});
    const Disk& win = sample.window;
    if (dist(clip.center, win.center) + clip.radius > win.radius * (1 + 1e-12))
        throw std::invalid_argument("build: clip disk must lie inside the sample window");

    ArrangementGraph g;
    g.clip = clip;
    const double tol = g.tolerance();

    std::vector<const MarkedLine*> order;
    for (const auto& m : sample.lines) order.push_back(&m);
    std::stable_sort(order.begin(), order.end(), [](auto a, auto b) { return a->id < b->id; });

    for (const MarkedLine* m : order) {
        auto ch = chord(m->line, clip);
        if (!ch || ch->second - ch->first <= tol) continue;
        std::vector<Interval> pieces{*ch};
        bool restricted = false;
        std::vector<Interval> allowed;
        for (const auto& c : options.corridors) {
            if (m->v < c.speed_lo || m->v >= c.speed_hi) continue;
            restricted = true;
            auto iv = corridor_intervals(m->line, c.spine, c.half_width);
            allowed.insert(allowed.end(), iv.begin(), iv.end());
        }
        if (restricted) {
            pieces.clear();
            for (auto iv : merge_intervals(allowed)) {
                double a = std::max(iv.first, ch->first), b = std::min(iv.second, ch->second);
                if (b - a > tol) pieces.push_back({a, b});
            }
            if (pieces.empty()) continue;
        }
        g.tracks.push_back({*m, std::move(pieces), {}});
    }

    const std::size_t nt = g.tracks.size();
    std::vector<double> cs(nt), sn(nt), rr(nt), lo(nt), hi(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        const Track& t = g.tracks[k];
        cs[k] = std::cos(t.line.line.phi);
        sn[k] = std::sin(t.line.line.phi);
        rr[k] = t.line.line.r;
        lo[k] = t.pieces.front().first - tol;
        hi[k] = t.pieces.back().second + tol;
    }

    std::vector<Candidate> cand;
    for (std::uint32_t k = 0; k < nt; ++k) {
        const Track& t = g.tracks[k];
        for (std::uint32_t q = 0; q < t.pieces.size(); ++q) {
            cand.push_back({t.line.line.point_at(t.pieces[q].first), k, kNone, t.pieces[q].first, 0, q, 0, 0});
            cand.push_back({t.line.line.point_at(t.pieces[q].second), k, kNone, t.pieces[q].second, 0, q, 0, 1});
        }
    }
    const std::size_t n_boundary = cand.size();

    for (std::uint32_t i = 0; i < nt; ++i) {
        const bool multi_i = g.tracks[i].pieces.size() > 1;
        for (std::uint32_t j = i + 1; j < nt; ++j) {
            double det = cs[i] * sn[j] - sn[i] * cs[j];
            if (std::abs(det) <= kAngleTol) continue;
            double px = (rr[i] * sn[j] - rr[j] * sn[i]) / det;
            double py = (cs[i] * rr[j] - cs[j] * rr[i]) / det;
            double ti = -sn[i] * px + cs[i] * py;
            if (ti < lo[i] || ti > hi[i]) continue;
            double tj = -sn[j] * px + cs[j] * py;
            if (tj < lo[j] || tj > hi[j]) continue;
            std::uint32_t pi = 0, pj = 0;
            if (multi_i && (pi = piece_of(g.tracks[i].pieces, ti, tol)) == kNone) continue;
            if (g.tracks[j].pieces.size() > 1 && (pj = piece_of(g.tracks[j].pieces, tj, tol)) == kNone) continue;
            if (cand.size() - n_boundary >= options.max_intersections)
                throw ResourceCapError(fmt::format("arrangement exceeds {} intersections", options.max_intersections));
            cand.push_back({{px, py}, i, j, ti, tj, pi, pj, 0});
        }
    }
    g.crossings = cand.size() - n_boundary;

    // merge near-coincident points; the lowest candidate index represents a cluster
    UnionFind uf(cand.size());
    {
        std::vector<std::uint32_t> idx(cand.size());
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
            return cand[a].p.x < cand[b].p.x || (cand[a].p.x == cand[b].p.x && a < b);
        });
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const Vec2 pa = cand[idx[a]].p;
            for (std::size_t b = a + 1; b < idx.size() && cand[idx[b]].p.x - pa.x <= tol; ++b)
                if (std::abs(cand[idx[b]].p.y - pa.y) <= tol && uf.unite(idx[a], idx[b])) ++g.merge_events;
        }
    }

    std::vector<std::uint32_t> vid(cand.size());
    std::vector<std::uint32_t> count(nt + 1, 0);
    g.vertices.reserve(cand.size());
    g.adjacency.reserve(cand.size());
    for (std::uint32_t c = 0; c < cand.size(); ++c) {
        std::uint32_t root = uf.find(c);
        const Candidate& cd = cand[c];
        if (root == c) {
            VertexKey key;
            if (cd.tj == kNone)
                key = {g.tracks[cd.ti].line.id, VertexKey::kEnd | (std::uint64_t{cd.pi} * 2 + cd.end)};
            else
                key = {g.tracks[cd.ti].line.id, g.tracks[cd.tj].line.id};
            vid[c] = add_vertex(g, cd.p, key);
        } else {
            vid[c] = vid[root];
        }
        auto& lines = g.vertices[vid[c]].lines;
        for (std::uint32_t t : {cd.ti, cd.tj}) {
            if (t == kNone) continue;
            std::uint64_t id = g.tracks[t].line.id;
            if (std::find(lines.begin(), lines.end(), id) == lines.end()) lines.push_back(id);
            ++count[t];
        }
    }

    for (std::uint32_t k = 0; k < nt; ++k) g.tracks[k].stops.reserve(count[k]);
    for (std::uint32_t c = 0; c < cand.size(); ++c) {
        const Candidate& cd = cand[c];
        g.tracks[cd.ti].stops.push_back({cd.si, vid[c], cd.pi, kNone});
        if (cd.tj != kNone) g.tracks[cd.tj].stops.push_back({cd.sj, vid[c], cd.pj, kNone});
    }
    cand.clear();
    cand.shrink_to_fit();

    for (auto& t : g.tracks) {
        auto& st = t.stops;
        std::sort(st.begin(), st.end(), [](const Stop& a, const Stop& b) {
            return a.t < b.t || (a.t == b.t && a.vertex < b.vertex);
        });
        st.erase(std::unique(st.begin(), st.end(), [](const Stop& a, const Stop& b) { return a.vertex == b.vertex; }),
                 st.end());
        for (std::size_t k = 0; k + 1 < st.size(); ++k) {
            if (st[k].piece != st[k + 1].piece) continue;
            double len = st[k + 1].t - st[k].t;
            if (!(len > 0)) continue;
            st[k].next_edge = add_edge(g, st[k].vertex, st[k + 1].vertex, static_cast<std::int64_t>(t.line.id), len,
                                       t.line.v);
        }
    }
    return g;
}

namespace {

// Vertex on track at arclength t, splitting the covering edge if needed.
std::uint32_t ensure_stop(ArrangementGraph& g, Track& tr, double t, std::uint64_t terminal_index) {
    const double tol = g.tolerance();
    auto& st = tr.stops;
    auto it = std::lower_bound(st.begin(), st.end(), t, [](const Stop& s, double x) { return s.t < x; });
    std::size_t k = static_cast<std::size_t>(it - st.begin());
    if (k < st.size() && st[k].t - t <= tol) return st[k].vertex;
    if (k > 0 && t - st[k - 1].t <= tol) return st[k - 1].vertex;
    if (k == 0 || k == st.size()) throw std::logic_error("ensure_stop: arclength outside the kept chord");
    Stop& prev = st[k - 1];
    const Stop next = st[k];
    if (prev.next_edge == kNone) throw std::logic_error("ensure_stop: arclength in a gap between pieces");

    const std::uint32_t e = prev.next_edge;
    const std::uint32_t nv =
        add_vertex(g, tr.line.line.point_at(t), {tr.line.id, VertexKey::kFoot | terminal_index});
    g.vertices[nv].lines.push_back(tr.line.id);
    // shorten e to prev -> nv, then add nv -> next
    Edge& old = g.edges[e];
    std::uint32_t far = next.vertex;
    old.length = t - prev.t;
    old.time = old.length / old.speed;
    if (old.u == far) old.u = nv; else old.v = nv;
    auto& adj_far = g.adjacency[far];
    adj_far.erase(std::find(adj_far.begin(), adj_far.end(), e));
    g.adjacency[nv].push_back(e);
    std::uint32_t ne = add_edge(g, nv, far, static_cast<std::int64_t>(tr.line.id), next.t - t, tr.line.v);
    st.insert(st.begin() + static_cast<std::ptrdiff_t>(k), Stop{t, nv, prev.piece, ne});
    return nv;
}

}  // namespace

Terminal inject_terminal(ArrangementGraph& g, Vec2 x, double epsilon, std::optional<std::size_t> k_nearest) {
    if (!(epsilon > 0)) throw std::invalid_argument("inject_terminal: epsilon must be positive");
    if (dist(x, g.clip.center) > g.clip.radius * (1 + 1e-12))
        throw std::invalid_argument(fmt::format("inject_terminal: point ({}, {}) outside clip", x.x, x.y));
    const double tol = g.tolerance();
    const std::uint64_t tix = g.terminals.size();
    g.epsilon = epsilon;

    struct Near {
        double d;
        std::uint64_t id;
        std::size_t track;
        double t;
    };
    std::vector<Near> near;
    near.reserve(g.tracks.size());
    for (std::size_t k = 0; k < g.tracks.size(); ++k) {
        const Track& tr = g.tracks[k];
        double t0 = tr.line.line.param(x);
        double best_t = t0, best_d = INFINITY;
        for (auto [a, b] : tr.pieces) {
            double t = std::clamp(t0, a, b);
            double d = dist(x, tr.line.line.point_at(t));
            if (d < best_d) best_d = d, best_t = t;
        }
        near.push_back({best_d, tr.line.id, k, best_t});
    }
    std::size_t k = k_nearest.value_or(near.size() <= 64 ? near.size() : 64);
    k = std::min(k, near.size());
    auto cmp = [](const Near& a, const Near& b) { return a.d < b.d || (a.d == b.d && a.id < b.id); };
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end(), cmp);
    near.resize(k);

    std::vector<std::uint32_t> feet;
    for (const auto& n : near) feet.push_back(ensure_stop(g, g.tracks[n.track], n.t, tix));

    std::uint32_t self = kNone;
    for (auto f : feet)
        if (dist(g.vertices[f].point, x) <= tol) {
            self = f;
            break;
        }
    if (self == kNone)
        for (auto t : g.terminals)
            if (dist(g.vertices[t].point, x) <= tol) {
                self = t;
                break;
            }
    if (self == kNone) self = add_vertex(g, x, {VertexKey::kTerminal | tix, 0});

    Terminal term{x, self, {}};
    std::vector<std::uint32_t> linked{self};
    auto walk_to = [&](std::uint32_t target) {
        if (std::find(linked.begin(), linked.end(), target) != linked.end()) return;
        linked.push_back(target);
        double len = dist(g.vertices[self].point, g.vertices[target].point);
        if (len <= tol) return;
        term.access_edges.push_back(add_edge(g, self, target, kWalk, len, epsilon));
    };
    for (auto f : feet) walk_to(f);
    for (auto t : g.terminals) walk_to(t);
    g.terminals.push_back(self);
    return term;
}

std::string to_json(const ArrangementGraph& g) {
    nlohmann::json j;
    j["clip"] = {{"cx", g.clip.center.x}, {"cy", g.clip.center.y}, {"R", g.clip.radius}};
    j["epsilon"] = g.epsilon;
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        vs.push_back({{"id", i}, {"x", g.vertices[i].point.x}, {"y", g.vertices[i].point.y}});
    auto& es = j["edges"] = nlohmann::json::array();
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        nlohmann::json line = e.line == kWalk ? nlohmann::json("WALK") : nlohmann::json(e.line);
        es.push_back({{"id", i}, {"u", e.u}, {"v", e.v}, {"line", line}, {"length", e.length},
                      {"speed", e.speed}, {"time", e.time}});
    }
    return io::dump_json(j);
}

}  // namespace sirsn
