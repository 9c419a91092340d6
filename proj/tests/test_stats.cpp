#include <doctest.h>

#include <cstdlib>

#include "oracles.hpp"
#include "sirsn/random.hpp"
#include "sirsn/stats.hpp"

using namespace sirsn;

TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    CHECK(tag("A") != tag("B"));
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("rng draws") {
    Rng r(17);
    double s = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        double u = r.uniform_pos();
        CHECK_MESSAGE((u > 0 && u <= 1), u);
        s += r.exponential(2.0);
    }
    CHECK(std::abs(s / N - 0.5) < 4 * 0.5 / std::sqrt(N));
    for (double mean : {0.3, 4.0, 60.0, 5000.0}) {
        double m = 0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) m += static_cast<double>(r.poisson(mean));
        CHECK(std::abs(m / n - mean) < 4 * std::sqrt(mean / n));
    }
}

TEST_CASE("Kolmogorov distribution") {
    CHECK(stats::kolmogorov_survival(1.0) == doctest::Approx(0.26999967).epsilon(1e-6));
    CHECK(stats::kolmogorov_survival(0.5) == doctest::Approx(0.96394524).epsilon(1e-6));
    CHECK(stats::kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(1e-2));
    CHECK(stats::kolmogorov_survival(0.0) == 1.0);
    CHECK(stats::kolmogorov_survival(10.0) < 1e-80);
}

TEST_CASE("KS tests detect and accept") {
    auto g = oracle::engine(1);
    std::vector<double> u, v, w;
    for (int i = 0; i < 2000; ++i) {
        u.push_back(oracle::unif(g));
        v.push_back(oracle::unif(g));
        w.push_back(oracle::unif(g) * 0.9);
    }
    auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(stats::ks_one_sample(u, cdf).p_value > 0.001);
    CHECK(stats::ks_one_sample(w, cdf).p_value < 1e-6);
    CHECK(stats::ks_two_sample(u, v).p_value > 0.001);
    CHECK(stats::ks_two_sample(u, w).p_value < 1e-6);
    CHECK(stats::ks_two_sample(u, u).statistic == 0.0);

    // p-values of a true null are roughly uniform
    int below = 0;
    for (int rep = 0; rep < 400; ++rep) {
        std::vector<double> x;
        for (int i = 0; i < 200; ++i) x.push_back(oracle::unif(g));
        below += stats::ks_one_sample(x, cdf).p_value < 0.1;
    }
    CHECK(below > 20);
    CHECK(below < 62);
}

TEST_CASE("chi-square") {
    std::vector<double> o{10, 20, 30}, e{10, 20, 30};
    auto r = stats::chi_square(o, e);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(r.dof == 2);
    std::vector<double> o2{60, 40}, e2{50, 50};
    auto r2 = stats::chi_square(o2, e2);
    CHECK(r2.statistic == doctest::Approx(4.0));
    CHECK(r2.p_value == doctest::Approx(0.0455).epsilon(1e-3));
    // pooling of small cells
    std::vector<double> o3{1, 2, 50, 47}, e3{1, 2, 50, 47};
    CHECK(stats::chi_square(o3, e3).dof == 1);
}

TEST_CASE("summaries") {
    std::vector<double> x{3, 1, 2, 10};
    CHECK(stats::mean(x) == doctest::Approx(4.0));
    CHECK(stats::median(x) == doctest::Approx(2.5));
    CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(((1 + 9 + 4 + 36) / 3.0) / 4)));
}
