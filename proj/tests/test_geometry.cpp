#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracles.hpp"
#include "sirsn/experiments.hpp"
#include "sirsn/geometry.hpp"

using namespace sirsn;

TEST_CASE("line basics") {
    Line l = Line::through({0, 1}, {1, 1});
    CHECK(l.distance({5, 3}) == doctest::Approx(2.0));
    CHECK(l.phi >= 0);
    CHECK(l.phi < kPi);
    Vec2 p = l.point_at(l.param({0.3, 7}));
    CHECK(p.x == doctest::Approx(0.3));
    CHECK(p.y == doctest::Approx(1.0));
    auto x = intersect(Line::through({0, 0}, {1, 1}), Line::through({0, 1}, {1, 0}));
    REQUIRE(x);
    CHECK(x->x == doctest::Approx(0.5));
    CHECK_FALSE(intersect(Line{0.3, 1}, Line{0.3, 2}));
    CHECK(reduce_angle(-0.5) == doctest::Approx(kPi - 0.5));
    CHECK(same_direction(Line{0, 0}, Line{kPi - 1e-13, 1}));
}

TEST_CASE("hitting measure of basic bodies") {
    CHECK(hitting_measure(Disk{{0, 0}, 1}) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(hitting_measure(Disk{{3.7, -2}, 1}) == hitting_measure(Disk{{0, 0}, 1}));
    CHECK(hitting_measure(Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}) == doctest::Approx(2.0));
    CHECK(hitting_measure(Segment{{0, 0}, {3, 4}}) == doctest::Approx(5.0));
    CHECK(hitting_measure(Segment{{0, 0}, {1e-12, 0}}) < 1e-11);
    // monotone under inclusion
    CHECK(hitting_measure(Disk{{0, 0}, 0.5}) < hitting_measure(Disk{{0.1, 0}, 0.7}));
    CHECK(hitting_measure(Polygon{{{0, 0}, {1, 0}, {0, 1}}}) <
          hitting_measure(Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}));
    CHECK_THROWS_AS(validate(Disk{{0, 0}, -1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}), std::invalid_argument);
}

TEST_CASE("lines meeting two segments") {
    Segment a{{-0.5, 0}, {-0.75, 0}}, b{{0, 0}, {0, 1}};
    CHECK(std::abs(measure_lines_meeting_two_segments(a, b) - (std::sqrt(5.0) - 2) / 4) < 1e-12);
    Segment l{{0, 0}, {1, 0}}, r{{0, 3}, {1, 3}};
    CHECK(std::abs(measure_lines_meeting_two_segments(l, r) - (std::sqrt(10.0) - 3)) < 1e-12);
    CHECK(measure_lines_meeting_two_segments(Segment{{0, 0}, {1, 0}}, Segment{{0, 1e-9}, {1, 1e-9}}) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(measure_lines_meeting_two_segments(b, a) == measure_lines_meeting_two_segments(a, b));
    CHECK_THROWS_AS(measure_lines_meeting_two_segments(Segment{{-1, 0}, {1, 0}}, Segment{{0, -1}, {0, 1}}),
                    std::domain_error);

    // symmetric, nonnegative, and matches a Monte Carlo count on random disjoint pairs
    auto g = oracle::engine(11);
    for (int k = 0; k < 20; ++k) {
        Segment s1{{oracle::unif(g, -1, 0), oracle::unif(g, -1, 1)}, {oracle::unif(g, -1, 0), oracle::unif(g, -1, 1)}};
        Segment s2{{oracle::unif(g, 0.1, 1), oracle::unif(g, -1, 1)}, {oracle::unif(g, 0.1, 1), oracle::unif(g, -1, 1)}};
        double m = measure_lines_meeting_two_segments(s1, s2);
        CHECK(m >= 0);
        CHECK(m == doctest::Approx(measure_lines_meeting_two_segments(s2, s1)).epsilon(1e-12));
        const int N = 20000;
        int both = 0;
        for (int i = 0; i < N; ++i) {
            Line l{oracle::unif(g, 0, kPi), oracle::unif(g, -2, 2)};
            both += hits(l, s1) && hits(l, s2);
        }
        double p = m / (2 * kPi);
        double se = std::sqrt(p * (1 - p) / N);
        CHECK(std::abs(static_cast<double>(both) / N - p) < 4 * se + 1e-9);
    }
}

TEST_CASE("Monte Carlo hitting of random convex polygons") {
    auto g = oracle::engine(5);
    const int N = 100000;
    for (int k = 0; k < 20; ++k) {
        // convex hull of random points in the disk of radius 1.9 is still inside disk(o, 2)
        std::vector<Vec2> pts;
        for (int i = 0; i < 8; ++i) {
            double r = 1.9 * std::sqrt(oracle::unif(g)), t = oracle::unif(g, 0, 2 * kPi);
            pts.push_back({r * std::cos(t), r * std::sin(t)});
        }
        std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
        std::vector<Vec2> hull;
        for (int pass = 0; pass < 2; ++pass) {
            std::size_t base = hull.size();
            for (Vec2 p : pts) {
                while (hull.size() >= base + 2 && cross(hull.back() - hull[hull.size() - 2], p - hull.back()) <= 0)
                    hull.pop_back();
                hull.push_back(p);
            }
            hull.pop_back();
            std::reverse(pts.begin(), pts.end());
        }
        Polygon poly{hull};
        int hit = 0;
        for (int i = 0; i < N; ++i) hit += hits(Line{oracle::unif(g, 0, kPi), oracle::unif(g, -2, 2)}, poly);
        double p = hitting_measure(poly) / (2 * kPi);
        CHECK(std::abs(static_cast<double>(hit) / N - p) < 4 * std::sqrt(p * (1 - p) / N));
    }
}

TEST_CASE("lines meeting two disks") {
    double v = measure_lines_meeting_two_disks({0, 0}, {1, 0}, 0.1);
    CHECK(v >= 0.005);
    CHECK(std::abs(v - oracle::two_disks_closed_form(1.0, 0.1)) < 1e-9);
    CHECK(measure_lines_meeting_two_disks({1, 0}, {0, 0}, 0.1) == v);
    CHECK(measure_lines_meeting_two_disks({0, 0}, {1, 0}, 1e-9) < 1e-8);
    CHECK_THROWS_AS(measure_lines_meeting_two_disks({0, 0}, {1, 0}, 0.6), std::domain_error);

    // rejection sampling of lines hitting ball((0.5,0), 0.6)
    auto g = oracle::engine(3);
    Disk big{{0.5, 0}, 0.6}, d1{{0, 0}, 0.1}, d2{{1, 0}, 0.1};
    const int N = 200000;
    int both = 0;
    for (int i = 0; i < N; ++i) {
        double phi = oracle::unif(g, 0, kPi);
        Line l{phi, dot(big.center, Vec2{std::cos(phi), std::sin(phi)}) + oracle::unif(g, -0.6, 0.6)};
        both += hits(l, d1) && hits(l, d2);
    }
    double p = v / hitting_measure(big);
    CHECK(std::abs(static_cast<double>(both) / N - p) < 3 * std::sqrt(p * (1 - p) / N));

    for (double r : {0.5, 1.0, 3.0})
        for (double alpha : {2.01, 3.0, 5.0, 10.0, 40.0}) {
            double m = measure_lines_meeting_two_disks({0, 0}, {r, 0}, r / alpha);
            CHECK(m >= r / (2 * alpha * alpha));
            CHECK(std::abs(m - oracle::two_disks_closed_form(r, r / alpha)) < 1e-9 * std::max(1.0, r));
        }
}

TEST_CASE("cost index") {
    CHECK(cost_index(2, kPi / 2, 5) == doctest::Approx(0.5));
    CHECK(cost_index(1, kPi / 4, 1) == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-14));
    CHECK(std::abs(cost_index(1.3, 1e-7, 1.3)) < 1e-6);
    CHECK_THROWS_AS(cost_index(1, 0, 1), std::domain_error);
    CHECK_THROWS_AS(cost_index(1, kPi, 1), std::domain_error);
    CHECK_THROWS_AS(cost_index(0, 1, 1), std::invalid_argument);
}

TEST_CASE("transformed intensity") {
    CHECK(cost_intensity_density(1, kPi / 2, 7, 3) == doctest::Approx(1.0));
    double th = 2.0, w = 1.5;
    double c0 = -std::cos(th) / (w * std::sin(th));
    CHECK(cost_intensity_density(c0, th, w, 3) < 1e-12);
    CHECK(cost_intensity_density(c0 - 1, th, w, 3) == 0.0);

    // change of variables back to speed: density(c(v)) |dc/dv| = (gamma-1)/2 v^-gamma
    auto g = oracle::engine(9);
    for (int i = 0; i < 100; ++i) {
        double v = oracle::unif(g, 0.1, 5), t = oracle::unif(g, 0.05, kPi - 0.05), ww = oracle::unif(g, 0.2, 6);
        double gamma = oracle::unif(g, 2.1, 6);
        double c = cost_index(v, t, ww);
        double lhs = cost_intensity_density(c, t, ww, gamma) / (std::sin(t) * v * v);
        CHECK(lhs == doctest::Approx((gamma - 1) / 2 * std::pow(v, -gamma)).epsilon(1e-10));
    }

    // integrated mass over the support equals the speed-density mass on [v_min, w)
    for (double gamma : {3.0, 4.0, 2.5})
        for (double ww : {1.0, 5.0}) {
            double vmin = ww / 8;
            double total = experiments::cost_cell_mass(gamma, ww, vmin, 0, kPi, -INFINITY, INFINITY);
            double expect = kPi / 2 * (std::pow(vmin, -(gamma - 1)) - std::pow(ww, -(gamma - 1)));
            CHECK(std::abs(total - expect) < 1e-6 * expect);
        }
}
