#include <doctest.h>

#include <cstdlib>
#include <set>

#include <boost/math/distributions/poisson.hpp>

#include "oracles.hpp"
#include "sirsn/line_process.hpp"
#include "sirsn/stats.hpp"

using namespace sirsn;

namespace {

double count_mean(double gamma, double v_floor, int n, std::uint64_t seed, double* se) {
    std::vector<double> c;
    for (int i = 0; i < n; ++i)
        c.push_back(static_cast<double>(sample({gamma, derive_seed(seed, {std::uint64_t(i)})}, Disk{{0, 0}, 1}, v_floor).lines.size()));
    *se = stats::standard_error(c);
    return stats::mean(c);
}

}  // namespace

TEST_CASE("sample invariants and determinism") {
    Disk w{{0.3, -0.2}, 1.5};
    LineSample a = sample({3.0, 42}, w, 0.5), b = sample({3.0, 42}, w, 0.5);
    CHECK(to_json(a) == to_json(b));
    CHECK_NOTHROW(check_sample(a));
    std::set<std::uint64_t> ids;
    for (const auto& m : a.lines) {
        CHECK(m.line.distance(w.center) <= w.radius + 1e-12);
        CHECK(m.v >= 0.5);
        CHECK(m.line.phi >= 0);
        CHECK(m.line.phi < kPi);
        ids.insert(m.id);
    }
    CHECK(ids.size() == a.lines.size());
    CHECK_THROWS_AS(sample({3.0, 1}, w, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sample({2.0, 1}, w, 1.0), std::invalid_argument);
    CHECK(sample({3.0, 1}, w, 1e6).lines.empty());
}

TEST_CASE("line count mean") {
    double se;
    double m = count_mean(3, 1, 4000, 1, &se);
    CHECK(std::abs(m - kPi) < 3 * se);
    CHECK(expected_line_count(3, 1, 0.5) == doctest::Approx(4 * kPi));
}

TEST_CASE("speed bands are independent Poisson") {
    const int n = 4000;
    std::vector<double> lo, hi;
    for (int i = 0; i < n; ++i) {
        auto s = sample({3.0, derive_seed(77, {std::uint64_t(i)})}, Disk{{0, 0}, 1}, 1.0);
        double a = 0, b = 0;
        for (const auto& m : s.lines) (m.v < 2 ? a : b) += 1;
        lo.push_back(a);
        hi.push_back(b);
    }
    for (auto [data, mean] : {std::pair{&lo, 0.75 * kPi}, std::pair{&hi, 0.25 * kPi}}) {
        std::vector<double> obs(15, 0), exp(15, 0);
        for (double x : *data) obs[std::min<std::size_t>(14, static_cast<std::size_t>(x))] += 1;
        boost::math::poisson_distribution<> pd(mean);
        for (int k = 0; k < 14; ++k) exp[k] = n * boost::math::pdf(pd, k);
        exp[14] = n * boost::math::cdf(boost::math::complement(pd, 13));
        CHECK(stats::chi_square(obs, exp).p_value > 0.001);
    }
    double ma = stats::mean(lo), mb = stats::mean(hi), cov = 0, va = 0, vb = 0;
    for (int i = 0; i < n; ++i) {
        cov += (lo[i] - ma) * (hi[i] - mb);
        va += (lo[i] - ma) * (lo[i] - ma);
        vb += (hi[i] - mb) * (hi[i] - mb);
    }
    CHECK(std::abs(cov / std::sqrt(va * vb)) < 4 / std::sqrt(double(n)));
}

TEST_CASE("refinement coupling") {
    LineSample s = sample({3.0, 5}, Disk{{0, 0}, 1}, 1.0);
    LineSample r = refine(s, 0.5);
    CHECK(to_json(filter_floor(r, 1.0)) != "");
    auto f = filter_floor(r, 1.0);
    REQUIRE(f.lines.size() == s.lines.size());
    for (std::size_t i = 0; i < s.lines.size(); ++i) {
        CHECK(f.lines[i].id == s.lines[i].id);
        CHECK(f.lines[i].v == s.lines[i].v);
        CHECK(f.lines[i].line.r == s.lines[i].line.r);
    }
    for (const auto& m : r.lines)
        if (!s.find(m.id)) {
            CHECK(m.v >= 0.5);
            CHECK(m.v < 1.0);
        }
    CHECK_THROWS_AS(refine(s, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(refine(s, 2.0), std::invalid_argument);

    // added count has mean pi (4 - 1)
    std::vector<double> added;
    for (int i = 0; i < 3000; ++i) {
        auto a = sample({3.0, derive_seed(9, {std::uint64_t(i)})}, Disk{{0, 0}, 1}, 1.0);
        added.push_back(double(refine(a, 0.5).lines.size() - a.lines.size()));
    }
    CHECK(std::abs(stats::mean(added) - 3 * kPi) < 3 * stats::standard_error(added));
}

TEST_CASE("refinement chain has the one-shot speed law") {
    std::vector<double> chain, direct;
    for (int i = 0; i < 3000; ++i) {
        auto s = sample({4.0, derive_seed(10, {std::uint64_t(i)})}, Disk{{0, 0}, 1}, 1.0);
        s = refine(refine(s, 0.8), 0.6);
        for (const auto& m : s.lines) chain.push_back(m.v);
        auto d = sample({4.0, derive_seed(11, {std::uint64_t(i)})}, Disk{{0, 0}, 1}, 0.6);
        for (const auto& m : d.lines) direct.push_back(m.v);
    }
    CHECK(stats::ks_two_sample(chain, direct).p_value > 0.01);
    CHECK(stats::ks_one_sample(chain, [](double v) { return v < 0.6 ? 0.0 : 1 - std::pow(v / 0.6, -3.0); }).p_value >
          0.01);
}

TEST_CASE("scaling") {
    LineSample s = sample({3.0, 21}, Disk{{0.5, 0.25}, 1}, 0.5);
    CHECK(to_json(scale(s, 1.0)) == to_json(s));
    CHECK(to_json(scale(scale(s, 2.0), 4.0)) == to_json(scale(s, 8.0)));
    auto a = scale(scale(s, 1.7), 0.3), b = scale(s, 1.7 * 0.3);
    for (std::size_t i = 0; i < s.lines.size(); ++i) {
        CHECK(a.lines[i].v == doctest::Approx(b.lines[i].v).epsilon(1e-14));
        CHECK(a.lines[i].line.r == doctest::Approx(b.lines[i].line.r).epsilon(1e-14));
    }
    auto t = scale(s, 3.0);
    auto argmax = [](const LineSample& x) {
        return std::max_element(x.lines.begin(), x.lines.end(), [](auto& p, auto& q) { return p.v < q.v; })->id;
    };
    REQUIRE(!s.lines.empty());
    CHECK(argmax(t) == argmax(s));
    CHECK(t.v_floor == doctest::Approx(0.5 * std::sqrt(3.0)));

    // scale(sample(R=1, floor 1), 2) against sample(R=2, floor 2^(1/(gamma-1)))
    const double gamma = 4, s2 = 2, sv = std::pow(s2, 1 / (gamma - 1));
    std::vector<double> ca, cb, va, vb;
    for (int i = 0; i < 3000; ++i) {
        auto x = scale(sample({gamma, derive_seed(31, {std::uint64_t(i)})}, Disk{{0, 0}, 1}, 1.0), s2);
        auto y = sample({gamma, derive_seed(32, {std::uint64_t(i)})}, Disk{{0, 0}, 2}, sv);
        ca.push_back(double(x.lines.size()));
        cb.push_back(double(y.lines.size()));
        for (const auto& m : x.lines) va.push_back(m.v);
        for (const auto& m : y.lines) vb.push_back(m.v);
    }
    CHECK(expected_line_count(gamma, 2, sv) == doctest::Approx(expected_line_count(gamma, 1, 1)));
    CHECK(std::abs(stats::mean(ca) - stats::mean(cb)) <
          3 * std::hypot(stats::standard_error(ca), stats::standard_error(cb)));
    CHECK(stats::ks_two_sample(va, vb).p_value > 0.01);
}

TEST_CASE("speed limit field") {
    LineSample s;
    s.window = Disk{{0, 0}, 2};
    s.v_floor = 1;
    CHECK(speed_limit_at(s, {0, 0}, 1e-9) == 0.0);
    s.lines = {{Line{0, 0}, 2, 0}, {Line{kPi / 2, 0}, 3, 1}, {Line{0, 1}, 5, 2}};
    CHECK(speed_limit_at(s, {0, 0}, 1e-9) == 3.0);
    CHECK(speed_limit_at(s, {1, 0.5}, 1e-9) == 5.0);
    CHECK(speed_limit_at(s, {0.5, 0.5}, 1e-9) == 0.0);
}

TEST_CASE("json round trip and cap") {
    LineSample s = refine(sample({3.5, 8}, Disk{{0.1, 0}, 1.2}, 1.0), 0.7);
    std::string j = to_json(s);
    LineSample t = sample_from_json(j);
    CHECK(to_json(t) == j);
    CHECK(t.bands == s.bands);
    // refining the reloaded sample continues the same stream
    CHECK(to_json(refine(t, 0.5)) == to_json(refine(s, 0.5)));

    setenv("SIRSN_MAX_LINES", "100", 1);
    CHECK_THROWS_AS(sample({3.0, 1}, Disk{{0, 0}, 1}, 0.1), ResourceCapError);
    unsetenv("SIRSN_MAX_LINES");
    CHECK_NOTHROW(sample({3.0, 1}, Disk{{0, 0}, 1}, 0.1));
}
