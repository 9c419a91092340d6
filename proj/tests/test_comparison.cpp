#include <doctest.h>

#include "oracles.hpp"
#include "sirsn/comparison.hpp"
#include "sirsn/stats.hpp"

using namespace sirsn;
using namespace sirsn::comparison;

TEST_CASE("wide numbers") {
    CHECK(Wide::of(3.0).value() == 3.0);
    CHECK((Wide::of(3.0) * Wide::of(0.25)).value() == 0.75);
    CHECK((Wide::of(3.0) / Wide::of(4.0)).value() == 0.75);
    CHECK((Wide::of(3.0) + Wide::of(4.0)).value() == 7.0);
    Wide huge = Wide::from_log(5000.0);
    CHECK(std::isinf(huge.value()));
    CHECK(huge.log() == doctest::Approx(5000.0));
    CHECK((huge / huge).value() == doctest::Approx(1.0));
    CHECK(Wide::of(2.0).pow(10).value() == doctest::Approx(1024.0));
    CHECK(Wide::of(0.0).value() == 0.0);
    CHECK(Wide::of(1234.5).str().find("e+03") != std::string::npos);
}

TEST_CASE("surface constants") {
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * kPi / 3));
    CHECK(ComparisonParams::make(2, 3, 1).omega == doctest::Approx(2 * kPi));
    CHECK(ComparisonParams::make(3, 3, 1).omega == doctest::Approx(4 * kPi));
}

TEST_CASE("initial state") {
    auto p = ComparisonParams::make(2, 3, 1.0);
    Rng rng(1);
    std::vector<double> s;
    for (int i = 0; i < 100000; ++i) s.push_back(init(p, rng).S.value());
    CHECK(std::abs(stats::mean(s) - 1 / kPi) < 3 * stats::standard_error(s));

    auto q = ComparisonParams::make(2, 3, 3.0);
    std::vector<double> x;
    for (int i = 0; i < 20000; ++i) x.push_back(init(q, rng).X);
    CHECK(stats::ks_one_sample(x, [](double v) { return v <= 0 ? 0.0 : -std::expm1(-kPi * v); }).p_value > 0.01);

    auto far = ComparisonParams::make(2, 3, 1e6);
    CHECK(init(far, rng).S.value() < 1e-3);
    CHECK_THROWS_AS(init(ComparisonParams::make(2, 3, 0.0), rng), std::invalid_argument);
}

TEST_CASE("recursion") {
    auto p = ComparisonParams::make(2, 3, 1.0);
    Rng rng(2);
    auto s = init(p, rng);
    auto same = step_with(s, 0.0, 1.0);
    CHECK(same.P.value() == s.P.value());
    CHECK(same.S.value() == s.S.value());
    CHECK(same.X == s.X);

    std::vector<double> logs;
    for (int i = 0; i < 100000; ++i) {
        auto n = step(s, p, rng);
        CHECK_MESSAGE(n.S.log() < s.S.log(), i);
        CHECK(n.P.log() >= s.P.log());
        logs.push_back(s.S.log() - n.S.log());
        s = n;
    }
    CHECK(stats::ks_one_sample(logs, [](double v) { return v <= 0 ? 0.0 : -std::expm1(-v); }).p_value > 0.01);
}

TEST_CASE("escape-time partial sums") {
    auto p = ComparisonParams::make(2, 2.5, 1.0);
    Rng a(4), b(4);
    auto rows = trace(p, 1, a);
    auto ps = escape_time_partial_sum(p, 1, b);
    REQUIRE(ps.size() == 1);
    double S0 = rows[0].state.S.value(), P0 = rows[0].state.P.value(), P1 = rows[1].state.P.value();
    CHECK(ps[0].value() == doctest::Approx(std::pow(S0, 1 / 1.5) * (P1 - P0)).epsilon(1e-12));

    Rng c(5);
    auto longer = escape_time_partial_sum(p, 200, c);
    for (std::size_t k = 1; k < longer.size(); ++k) CHECK(longer[k].log() >= longer[k - 1].log());
    auto csv = to_csv(trace(p, 3, c));
    CHECK(csv.rfind("n,P,S,X,partial_sum\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK_THROWS_AS(escape_time_partial_sum(p, 0, c), std::invalid_argument);
}

TEST_CASE("envelope") {
    LineSample s;
    s.window = Disk{{0, 0}, 3};
    CHECK(envelope(s, 1.0)(5.0) == 1.0);
    s.lines = {{Line{0.3, 0.5}, 2.0, 0}};
    auto e = envelope(s, 1.0);
    CHECK(e(0.0) == 1.0);
    CHECK(e(1.5) == doctest::Approx(4.0));

    // domination along computed routes
    int pairs = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto smp = sample({3.0, seed}, Disk{{0, 0}, 2}, 0.4);
        auto gen = oracle::engine(seed);
        double r0 = 0.3;
        double ang = oracle::unif(gen, 0, 2 * kPi), rad = r0 * std::sqrt(oracle::unif(gen));
        Vec2 a{rad * std::cos(ang), rad * std::sin(ang)};
        Vec2 b{oracle::unif(gen, -1.2, 1.2), oracle::unif(gen, -1.2, 1.2)};
        const double eps = 0.05;
        auto g = build(smp, smp.window);
        auto ta = inject_terminal(g, a, eps), tb = inject_terminal(g, b, eps);
        auto r = shortest_time_route(g, ta, tb, {false, 1e-9});
        auto env = envelope(smp, r0, eps);
        bool ok = true;
        for (int k = 0; k <= 1000; ++k) {
            double t = r.total_time * k / 1000.0;
            ok = ok && norm(position_at(r, t)) <= env(t) * (1 + 1e-9) + 1e-12;
        }
        CHECK(ok);
        ++pairs;
    }
    CHECK(pairs == 200);
}
