#include "sirsn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sirsn/experiments.hpp"
#include "sirsn/io.hpp"

namespace sirsn::cli {

namespace fs = std::filesystem;

namespace {

void draw_route(io::Svg& svg, const Route& r, double v_floor, double v_top, double width) {
    for (const auto& s : r.segments) {
        if (s.kind == SegmentKind::Walk)
            svg.line(s.from.x, s.from.y, s.to.x, s.to.y, "#c0392b", 1.0, true);
        else
            svg.line(s.from.x, s.from.y, s.to.x, s.to.y, io::speed_stroke(s.speed, v_floor, v_top), width);
    }
}

double top_speed(const std::vector<Route>& routes, double fallback) {
    double top = fallback;
    for (const auto& r : routes)
        for (const auto& s : r.segments)
            if (s.kind == SegmentKind::Line) top = std::max(top, s.speed);
    return top;
}

}  // namespace

std::string render_svg(const LineSample& sample, const Disk& view, const std::vector<Route>& routes,
                       const std::vector<Vec2>& points) {
    io::Svg svg(view.center.x, view.center.y, view.radius);
    double top = sample.v_floor;
    for (const auto& m : sample.lines) top = std::max(top, m.v);
    for (const auto& m : sample.lines) {
        auto c = chord(m.line, view);
        if (!c) continue;
        Vec2 a = m.line.point_at(c->first), b = m.line.point_at(c->second);
        svg.line(a.x, a.y, b.x, b.y, io::speed_stroke(m.v, sample.v_floor, top), 0.8);
    }
    for (const auto& r : routes) {
        for (const auto& s : r.segments)
            svg.line(s.from.x, s.from.y, s.to.x, s.to.y, s.kind == SegmentKind::Walk ? "#c0392b" : "#1f5fbf", 2.5,
                     s.kind == SegmentKind::Walk);
    }
    for (Vec2 p : points) svg.circle(p.x, p.y, 4, "#c0392b");
    return svg.str();
}

std::string render_routes_svg(const std::vector<Route>& routes, const Disk& view, double v_floor,
                              const std::vector<Vec2>& points) {
    io::Svg svg(view.center.x, view.center.y, view.radius);
    double top = top_speed(routes, v_floor);
    for (const auto& r : routes) draw_route(svg, r, v_floor, top, 2.0);
    for (Vec2 p : points) svg.circle(p.x, p.y, 3, "#c0392b");
    return svg.str();
}

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Common {
    double gamma = 3.0;
    double v_floor = 1.0;
    double epsilon = 0.05;
    double radius = 0.0;  // 0: command default
    std::uint64_t seed = kDefaultSeed;
    int levels = 1;
    std::size_t k_nearest = 0;  // 0: default selection
    std::string out = ".";
    std::vector<std::string> formats;

    bool wants(const std::string& f) const {
        return formats.empty() || std::find(formats.begin(), formats.end(), f) != formats.end();
    }
    std::optional<std::size_t> k() const { return k_nearest ? std::optional<std::size_t>(k_nearest) : std::nullopt; }
};

const auto kGammaCheck = CLI::Validator(
    [](std::string& s) -> std::string {
        double g = std::stod(s);
        return g > 2 ? "" : "gamma must exceed 2";
    },
    "GAMMA>2");

void add_common(CLI::App* app, Common& c, bool routing) {
    app->add_option("--gamma", c.gamma, "speed exponent")->check(kGammaCheck);
    app->add_option("--v-floor", c.v_floor, "speed floor")->check(CLI::PositiveNumber);
    if (routing) {
        app->add_option("--epsilon", c.epsilon, "walking speed and walking-time budget")->check(CLI::PositiveNumber);
        app->add_option("--k-nearest", c.k_nearest, "lines reachable by walking from a terminal")
            ->check(CLI::PositiveNumber);
    }
    app->add_option("--radius", c.radius, "window radius")->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, fmt::format("seed (default {})", kDefaultSeed));
    app->add_option("--out", c.out, "output directory");
    app->add_option("--format", c.formats, "outputs to write")->check(CLI::IsMember({"json", "csv", "svg"}));
}

void emit(const Common& c, const std::string& name, const std::string& content) {
    fs::path p = fs::path(c.out) / name;
    io::write_file_atomic(p, content);
    std::cout << p.string() << "\n";
}

void cmd_sample(const Common& c) {
    double R = c.radius > 0 ? c.radius : 1.0;
    Disk w{{0, 0}, R};
    LineSample s = sample({c.gamma, c.seed}, w, c.v_floor);
    if (c.wants("json")) emit(c, "sample.json", to_json(s));
    if (c.wants("svg")) emit(c, "sample.svg", render_svg(s, w));
}

void cmd_route(const Common& c, Vec2 x1, Vec2 x2) {
    if (c.levels < 1) throw UsageError("--levels must be at least 1");
    std::vector<ScheduleLevel> schedule;
    for (int k = 0; k < c.levels; ++k)
        schedule.push_back({c.v_floor * std::ldexp(1.0, -k), c.epsilon, c.k(), 0.0});
    ConvergeOptions opt;
    opt.keep_routes = true;
    if (c.radius > 0) opt.window = Disk{(x1 + x2) * 0.5, c.radius};
    Disk w = opt.window.value_or(Disk{(x1 + x2) * 0.5, std::max(opt.min_window_radius, dist(x1, x2))});
    if (dist(x1, w.center) > w.radius || dist(x2, w.center) > w.radius)
        throw UsageError("endpoints must lie inside the window");
    auto rep = converge(x1, x2, {c.gamma, c.seed}, schedule, opt);
    if (rep.routes.empty()) throw ResourceCapError(rep.note);
    if (rep.truncated) std::cerr << "warning: " << rep.note << "\n";
    const Route& r = rep.routes.back();
    if (c.wants("json")) emit(c, "route.json", to_json(r));
    if (c.wants("svg")) emit(c, "route.svg", render_svg(*rep.sample, w, {r}, {x1, x2}));
    if (c.levels > 1 && c.wants("csv")) emit(c, "convergence.csv", to_csv(rep));
    std::cout << fmt::format("time {} length {}\n", io::format_double(r.total_time), io::format_double(r.total_length));
}

void cmd_network(const Common& c, const std::vector<double>& gammas, std::size_t per_cluster,
                 const std::vector<double>& pa, const std::vector<double>& pb) {
    auto cfg = experiments::default_network(c.seed, per_cluster);
    auto pairs = [](const std::vector<double>& v, const char* flag) {
        if (v.size() % 2) throw UsageError(fmt::format("{} takes x y pairs", flag));
        std::vector<Vec2> out;
        for (std::size_t i = 0; i < v.size(); i += 2) out.push_back({v[i], v[i + 1]});
        return out;
    };
    if (!pa.empty()) cfg.cluster_a = pairs(pa, "--points-a");
    if (!pb.empty()) cfg.cluster_b = pairs(pb, "--points-b");
    if (c.radius > 0) cfg.window.radius = c.radius;
    for (auto* cl : {&cfg.cluster_a, &cfg.cluster_b})
        for (Vec2 p : *cl)
            if (dist(p, cfg.window.center) > cfg.window.radius) throw UsageError("cluster point outside the window");

    std::vector<Vec2> pts = cfg.cluster_a;
    pts.insert(pts.end(), cfg.cluster_b.begin(), cfg.cluster_b.end());
    std::string csv = "gamma,routes,union_length,shared_length,sharing\n";
    for (double g : gammas) {
        if (!(g > 2)) throw UsageError("gamma must exceed 2");
        auto res = experiments::network_routes(g, cfg, c.seed);
        std::string tag = fmt::format("{}", g);  // shortest form, for file names
        if (c.wants("svg"))
            emit(c, fmt::format("network_gamma{}.svg", tag),
                 render_routes_svg(res.routes, cfg.window, res.sample.v_floor, pts));
        if (c.wants("json")) {
            nlohmann::json j;
            j["gamma"] = g;
            j["seed"] = c.seed;
            j["sharing"] = res.sharing();
            j["union_length"] = res.lengths.union_length;
            j["shared_length"] = res.lengths.shared_length;
            j["routes"] = nlohmann::json::array();
            for (const auto& r : res.routes) j["routes"].push_back(nlohmann::json::parse(to_json(r)));
            emit(c, fmt::format("network_gamma{}.json", tag), io::dump_json(j));
        }
        csv += fmt::format("{},{},{},{},{}\n", tag, res.routes.size(), io::format_double(res.lengths.union_length),
                           io::format_double(res.lengths.shared_length), io::format_double(res.sharing()));
    }
    if (c.wants("csv")) emit(c, "network.csv", csv);
}

void cmd_experiment(const Common& c, const std::string& name, const nlohmann::json& args) {
    const auto& reg = experiments::registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        std::string names;
        for (const auto& [k, v] : reg) names += "\n  " + k;
        throw UsageError(fmt::format("unknown experiment '{}'; available:{}", name, names));
    }
    auto rep = it->second(args, c.seed);
    emit(c, name + ".json", io::dump_json(rep.to_json()));
    std::cout << fmt::format("{}: {}\n", name, rep.status());
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Speed-marked Poisson line networks: sampling, routing and experiments"};
    app.require_subcommand(1);

    Common sc, rc, nc, ec;
    auto* s = app.add_subcommand("sample", "draw a line sample in a disk");
    add_common(s, sc, false);

    auto* r = app.add_subcommand("route", "fastest route between two points");
    add_common(r, rc, true);
    std::vector<double> x1{-0.5, 0.0}, x2{0.5, 0.0};
    r->add_option("--x1", x1, "start point")->expected(2);
    r->add_option("--x2", x2, "end point")->expected(2);
    r->add_option("--levels", rc.levels, "refinement levels, halving the floor each time")->check(CLI::PositiveNumber);

    auto* n = app.add_subcommand("network", "pairwise routes between two point clusters");
    add_common(n, nc, true);
    std::vector<double> gammas{2.1, 4.0, 8.0, 16.0}, pa, pb;
    std::size_t per_cluster = 6;
    n->add_option("--gammas", gammas, "speed exponents to draw (--gamma draws just one)");
    n->add_option("--per-cluster", per_cluster, "random points per cluster");
    n->add_option("--points-a", pa, "cluster A as x y pairs");
    n->add_option("--points-b", pb, "cluster B as x y pairs");

    auto* e = app.add_subcommand("experiment", "run a registered experiment");
    add_common(e, ec, true);
    std::string name;
    double s_scale = 0;
    std::size_t replicates = 0;
    e->add_option("name", name, "experiment name")->required();
    e->add_option("--s", s_scale, "scale factor")->check(CLI::PositiveNumber);
    e->add_option("--replicates", replicates, "replicate count")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return 2;
    }

    try {
        if (s->parsed()) cmd_sample(sc);
        else if (r->parsed()) cmd_route(rc, {x1[0], x1[1]}, {x2[0], x2[1]});
        else if (n->parsed()) {
            if (n->count("--gamma")) gammas = {nc.gamma};
            cmd_network(nc, gammas, per_cluster, pa, pb);
        }
        else {
            nlohmann::json args = nlohmann::json::object();
            if (e->count("--gamma")) args["gamma"] = ec.gamma;
            if (e->count("--v-floor")) args["v_floor"] = ec.v_floor;
            if (e->count("--radius")) args["radius"] = ec.radius;
            if (e->count("--s")) args["s"] = s_scale;
            if (replicates) args["replicates"] = replicates;
            cmd_experiment(ec, name, args);
        }
    } catch (const ResourceCapError& ex) {
        std::cerr << "resource cap: " << ex.what() << "\n";
        return 3;
    } catch (const io::IoError& ex) {
        std::cerr << "i/o error: " << ex.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "usage: " << ex.what() << "\n";
        return 2;
    } catch (const std::domain_error& ex) {
        std::cerr << "usage: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace sirsn::cli
