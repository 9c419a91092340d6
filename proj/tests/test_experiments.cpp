#include <doctest.h>

#include "oracles.hpp"
#include "sirsn/experiments.hpp"
#include "sirsn/fibre.hpp"
#include "sirsn/stats.hpp"

using namespace sirsn;
using namespace sirsn::experiments;

TEST_CASE("scale equivariance pieces") {
    auto r1 = scale_invariance_test(3.0, 1.0, 60, 5);
    CHECK(r1.pass);
    CHECK(r1.replicates == 60);
    CHECK(r1.seeds.size() == 120);
    auto r4 = scale_invariance_test(4.0, 2.0, 5, 5);
    CHECK(r4.statistics["time_exponent"].get<double>() == doctest::Approx(2.0 / 3));
    CHECK_THROWS_AS(scale_invariance_test(2.0, 2.0, 5), std::invalid_argument);

    // under the exact coupling, lengths scale by s and times by s^((gamma-2)/(gamma-1))
    const double gamma = 4, s = 2, sv = std::pow(s, 1 / (gamma - 1));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto a = sample({gamma, seed}, Disk{{0, 0}, 1}, 0.5);
        auto b = scale(a, s);
        auto ga = build(a, a.window), gb = build(b, b.window);
        auto ra = shortest_time_route(ga, inject_terminal(ga, {-0.5, 0}, 0.1), inject_terminal(ga, {0.5, 0}, 0.1));
        auto rb = shortest_time_route(gb, inject_terminal(gb, {-1, 0}, 0.1 * sv), inject_terminal(gb, {1, 0}, 0.1 * sv));
        CHECK(rb.total_length == doctest::Approx(s * ra.total_length).epsilon(1e-9));
        CHECK(rb.total_time == doctest::Approx(ra.total_time * s / sv).epsilon(1e-9));
    }
}

TEST_CASE("mean length") {
    auto sched = mean_length_schedule();
    sched.resize(3);
    auto z = mean_length_estimate(3.0, 0.0, sched, 3);
    for (const auto& l : z.statistics["levels"]) CHECK(l["mean_length"].get<double>() == 0.0);
    auto m = mean_length_estimate(3.0, 1.0, sched, 10);
    for (const auto& l : m.statistics["levels"]) CHECK(l["min_length"].get<double>() >= 1.0 - 1e-12);
}

TEST_CASE("fibre length") {
    FibreConfig cfg;
    // tiny intensity: at most one point
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto r = fibre_realization(0.01, cfg, seed);
        if (r.points.size() <= 1) CHECK(r.lengths.union_length == 0.0);
    }
    int two = 0, rastered = 0;
    for (std::uint64_t seed = 0; seed < 300 && (two < 5 || rastered < 10); ++seed) {
        double lam = seed % 2 ? 0.5 : 2.0;
        auto r = fibre_realization(lam, cfg, seed);
        if (r.points.size() == 2 && two < 5) {
            ++two;
            double len = 0;
            for (const auto& sgm : r.routes[0].segments)
                if (auto c = clip_segment(sgm.from, sgm.to, cfg.window)) len += sgm.length * (c->second - c->first);
            CHECK(r.lengths.union_length == doctest::Approx(len).epsilon(1e-9));
        }
        CHECK(r.lengths.union_length <= r.lengths.sum_length * (1 + 1e-12) + 1e-12);
        if (r.points.size() >= 4 && rastered < 10) {
            ++rastered;
            oracle::Raster ras(1e-3);
            for (const auto& rt : r.routes)
                for (const auto& sgm : rt.segments)
                    if (auto c = clip_segment(sgm.from, sgm.to, cfg.window)) {
                        Vec2 d = sgm.to - sgm.from;
                        ras.add(sgm.from + d * c->first, sgm.from + d * c->second);
                    }
            CHECK(ras.length() == doctest::Approx(r.lengths.union_length).epsilon(0.01));
        }
    }
    CHECK(two == 5);
    CHECK(rastered == 10);
    CHECK_THROWS_AS(fibre_realization(100.0, cfg, 1), ResourceCapError);
}

TEST_CASE("route union bookkeeping") {
    LineSample s;
    s.window = Disk{{0, 0}, 2};
    s.lines = {{Line{kPi / 2, 0}, 1.0, 0}};
    Route a, b;
    a.segments.push_back({SegmentKind::Line, 0, {-1, 0}, {0.5, 0}, 1, 1.5, 1.5});
    b.segments.push_back({SegmentKind::Line, 0, {0.7, 0}, {-0.2, 0}, 1, 0.9, 0.9});
    b.segments.push_back({SegmentKind::Walk, kWalk, {-0.2, 0}, {-0.2, 0.1}, 0.01, 0.1, 10});
    auto u = route_union({a, b}, &s);
    CHECK(u.union_length == doctest::Approx(1.7 + 0.1));
    CHECK(u.shared_length == doctest::Approx(0.7));
    CHECK(u.sum_length == doctest::Approx(2.5));
    auto boxed = route_union({a, b}, &s, Box{{0, -1}, {1, 1}});
    CHECK(boxed.union_length == doctest::Approx(0.7));
}

TEST_CASE("cost index samples") {
    auto cs = cost_samples(3.0, 1.0, 20000, 0.125, 3);
    REQUIRE(cs.size() == 20000);
    std::vector<double> th;
    for (const auto& c : cs) {
        CHECK(c.c * std::sin(c.theta) + std::cos(c.theta) / 1.0 > 0);
        CHECK(c.v < 1.0);
        CHECK(c.c == doctest::Approx(cost_index(c.v, c.theta, 1.0)));
        th.push_back(c.theta);
    }
    CHECK(cost_index(0.5, kPi / 2, 1.0) == doctest::Approx(2.0));
    // theta marginal: uniform for the speed-restricted process, in the data and in the model
    CHECK(stats::ks_one_sample(th, [](double t) { return std::clamp(t / kPi, 0.0, 1.0); }).p_value > 0.01);
    double total = cost_cell_mass(3.0, 1.0, 0.125, 0, kPi, -INFINITY, INFINITY);
    for (int k = 0; k < 10; ++k)
        CHECK(cost_cell_mass(3.0, 1.0, 0.125, kPi * k / 10, kPi * (k + 1) / 10, -INFINITY, INFINITY) ==
              doctest::Approx(total / 10).epsilon(1e-7));
    auto rep = cost_density_validation(3.0, 5.0, 20000, 4);
    CHECK(rep.pass);
}

TEST_CASE("forcing fixture") {
    ForcingFixture f;
    CHECK(f.applicable());
    CHECK(f.structure(100).size() == 9);
    auto s = f.sample(3);
    Polygon big{{{-5, -3}, {5, -3}, {5, 7}, {-5, 7}}};
    int structural = 0;
    for (const auto& m : s.lines) {
        if (m.v > 1 && hits(m.line, big)) ++structural;
    }
    CHECK(structural == 9);
    // straight down the axis
    auto g = build(s, f.clip);
    auto a = inject_terminal(g, {0, 0.5}, f.epsilon), b = inject_terminal(g, {0, -6}, f.epsilon);
    auto r = shortest_time_route(g, a, b, {false, 1e-9});
    CHECK(distance_to_route(r, kForcingA) < 1e-6);
    CHECK(distance_to_route(r, kForcingB) < 1e-6);

    ForcingFixture bad;
    bad.a = 1;
    CHECK_FALSE(bad.applicable());
    auto rep = forcing_fixture_test(bad, 3);
    CHECK(rep.status() == "not-applicable");
}

TEST_CASE("coalescence probe") {
    auto sched = mean_length_schedule();
    sched.resize(2);
    auto rep = coalescence_probe({0, 0}, {1, 0.2}, {1, 0.2}, sched, 4);
    for (const auto& l : rep.statistics["levels"]) CHECK(l["mean_prefix_fraction"].get<double>() == 1.0);
    CHECK_THROWS_AS(coalescence_probe({0, 0}, {0, 0}, {1, 0}, sched, 1), std::invalid_argument);
}

TEST_CASE("network routes") {
    NetworkConfig one;
    one.cluster_a = {{-1, 0}};
    one.cluster_b = {{1, 0}};
    CHECK(network_routes(4.0, one, 1).routes.size() == 1);
    NetworkConfig empty;
    empty.cluster_a = {{-1, 0}};
    auto e = network_routes(4.0, empty, 1);
    CHECK(e.routes.empty());
    CHECK(e.sharing() == 0.0);
    auto d = default_network(9, 6);
    CHECK(d.cluster_a.size() == 6);
    for (Vec2 p : d.cluster_a) CHECK(dist(p, Vec2{-1, 0}) <= 0.25);
    CHECK(network_routes(4.0, d, 9).routes.size() == 36);
}

TEST_CASE("reports are reproducible") {
    auto a = fastest_line_law(3.0, 1.0, 1.0, 300, 12), b = fastest_line_law(3.0, 1.0, 1.0, 300, 12);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_json()["seeds"].size() == 300);
    for (const auto& [name, run] : registry()) CHECK(!name.empty());
    CHECK(registry().count("forcing-fixture") == 1);
}
