#include "sirsn/line_process.hpp"

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>

#include "sirsn/io.hpp"

namespace sirsn {

void ProcessParams::validate() const {
    if (!(gamma > 2) || !std::isfinite(gamma))
        throw std::invalid_argument(fmt::format("gamma must exceed 2 (got {})", gamma));
}

const MarkedLine* LineSample::find(std::uint64_t id) const {
    auto it = std::lower_bound(lines.begin(), lines.end(), id,
                               [](const MarkedLine& m, std::uint64_t i) { return m.id < i; });
    if (it != lines.end() && it->id == id) return &*it;
    for (const auto& m : lines)
        if (m.id == id) return &m;
    return nullptr;
}

double line_count_cap() {
    if (const char* env = std::getenv("SIRSN_MAX_LINES")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0) return v;
    }
    return 1e6;
}

double expected_line_count(double gamma, double radius, double v_floor) {
    return kPi * radius * std::pow(v_floor, -(gamma - 1));
}

namespace {

void check_window(const Disk& w) {
    if (!(w.radius > 0) || !std::isfinite(w.radius))
        throw std::invalid_argument("window radius must be positive");
}

void check_cap(double expected, double v_floor) {
    double cap = line_count_cap();
    if (expected > cap)
        throw ResourceCapError(fmt::format(
            "expected line count {:.6g} exceeds cap {:.6g} at v_floor {:.6g}; use a larger v_floor",
            expected, cap, v_floor));
}

}  // namespace

LineSample sample(const ProcessParams& params, const Disk& window, double v_floor) {
    params.validate();
    check_window(window);
    if (!(v_floor > 0) || !std::isfinite(v_floor))
        throw std::invalid_argument("v_floor must be positive");
    double mean = expected_line_count(params.gamma, window.radius, v_floor);
    check_cap(mean, v_floor);

    LineSample s{params, window, v_floor, {}, 1, 0};
    Rng rng(derive_seed(params.seed, {0}));
    std::uint64_t n = rng.poisson(mean);
    s.lines.reserve(n);
    const double k = -1.0 / (params.gamma - 1);
    for (std::uint64_t i = 0; i < n; ++i) {
        // order of draws: phi, offset, speed
        double phi = rng.uniform() * kPi;
        double u = rng.uniform(-window.radius, window.radius);
        double v = v_floor * std::pow(rng.uniform_pos(), k);
        double r = dot(window.center, Vec2{std::cos(phi), std::sin(phi)}) + u;
        s.lines.push_back({Line{phi, r}, v, s.next_id++});
    }
    return s;
}

LineSample refine(const LineSample& s, double new_v_floor) {
    if (!(new_v_floor > 0)) throw std::invalid_argument("refine: v_floor must be positive");
    if (!(new_v_floor < s.v_floor))
        throw std::invalid_argument("refine: new v_floor must be below the current floor");
    const double g1 = s.params.gamma - 1;
    const double s_old = std::pow(s.v_floor, -g1), s_new = std::pow(new_v_floor, -g1);
    check_cap(kPi * s.window.radius * s_new, new_v_floor);

    LineSample out = s;
    Rng rng(derive_seed(s.params.seed, {s.bands}));
    std::uint64_t n = rng.poisson(kPi * s.window.radius * (s_new - s_old));
    out.lines.reserve(s.lines.size() + n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double phi = rng.uniform() * kPi;
        double u = rng.uniform(-s.window.radius, s.window.radius);
        // meta-slowness v^-(gamma-1) uniform on (s_old, s_new]
        double m = s_new - rng.uniform() * (s_new - s_old);
        double v = std::clamp(std::pow(m, -1.0 / g1), new_v_floor, std::nextafter(s.v_floor, 0.0));
        double r = dot(s.window.center, Vec2{std::cos(phi), std::sin(phi)}) + u;
        out.lines.push_back({Line{phi, r}, v, out.next_id++});
    }
    out.v_floor = new_v_floor;
    out.bands = s.bands + 1;
    return out;
}

LineSample scale(const LineSample& s, double factor) {
    if (!(factor > 0)) throw std::invalid_argument("scale: factor must be positive");
    const double sv = std::pow(factor, 1.0 / (s.params.gamma - 1));
    LineSample out = s;
    out.window.center = s.window.center * factor;
    out.window.radius = s.window.radius * factor;
    out.v_floor = s.v_floor * sv;
    for (auto& m : out.lines) {
        m.line.r *= factor;
        m.v *= sv;
    }
    return out;
}

double speed_limit_at(const LineSample& s, Vec2 x, double tol) {
    double best = 0.0;
    for (const auto& m : s.lines)
        if (m.line.distance(x) <= tol) best = std::max(best, m.v);
    return best;
}

LineSample filter_floor(const LineSample& s, double v) {
    LineSample out = s;
    out.lines.clear();
    for (const auto& m : s.lines)
        if (m.v >= v) out.lines.push_back(m);
    out.v_floor = std::max(v, s.v_floor);
    return out;
}

void check_sample(const LineSample& s) {
    std::uint64_t prev = 0;
    bool first = true;
    for (const auto& m : s.lines) {
        if (m.line.distance(s.window.center) > s.window.radius + 1e-12 * std::max(1.0, s.window.radius))
            throw std::logic_error(fmt::format("line {} misses the window", m.id));
        if (!(m.v >= s.v_floor)) throw std::logic_error(fmt::format("line {} below the floor", m.id));
        if (!(m.line.phi >= 0 && m.line.phi < kPi))
            throw std::logic_error(fmt::format("line {} angle out of range", m.id));
        if (!first && m.id <= prev) throw std::logic_error("line ids not strictly increasing");
        prev = m.id;
        first = false;
    }
}

std::string to_json(const LineSample& s) {
    nlohmann::json j;
    j["version"] = 1;
    j["gamma"] = s.params.gamma;
    j["seed"] = s.params.seed;
    j["bands"] = s.bands;
    j["next_id"] = s.next_id;
    j["window"] = {{"cx", s.window.center.x}, {"cy", s.window.center.y}, {"R", s.window.radius}};
    j["v_floor"] = s.v_floor;
    auto& arr = j["lines"] = nlohmann::json::array();
    for (const auto& m : s.lines)
        arr.push_back({{"id", m.id}, {"phi", m.line.phi}, {"r", m.line.r}, {"v", m.v}});
    return io::dump_json(j);
}

LineSample sample_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported sample version");
    LineSample s;
    s.params.gamma = j.at("gamma").get<double>();
    s.params.seed = j.at("seed").get<std::uint64_t>();
    s.bands = j.value("bands", 1u);
    const auto& w = j.at("window");
    s.window = Disk{{w.at("cx").get<double>(), w.at("cy").get<double>()}, w.at("R").get<double>()};
    s.v_floor = j.at("v_floor").get<double>();
    for (const auto& l : j.at("lines"))
        s.lines.push_back({Line{l.at("phi").get<double>(), l.at("r").get<double>()}, l.at("v").get<double>(),
                           l.at("id").get<std::uint64_t>()});
    s.next_id = j.value("next_id", s.lines.empty() ? 0 : s.lines.back().id + 1);
    return s;
}

}  // namespace sirsn
