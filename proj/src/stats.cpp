#include "sirsn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace sirsn::stats {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double m = mean(x), ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

double median(std::vector<double> x) {
    if (x.empty()) return 0.0;
    std::sort(x.begin(), x.end());
    std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0) return 1.0;
    const double pi = 3.141592653589793;
    if (lambda < 1.18) {
        // Jacobi-transformed series converges fast for small lambda
        double s = 0.0, f = -pi * pi / (8 * lambda * lambda);
        for (int j = 1; j < 20; j += 2) s += std::exp(f * j * j);
        return std::clamp(1.0 - std::sqrt(2 * pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int j = 1; j < 100; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        s += (j % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

namespace {
double corrected_p(double d, double ne) {
    double sq = std::sqrt(ne);
    return kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
}
}  // namespace

TestResult ks_one_sample(std::vector<double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw std::invalid_argument("ks_one_sample: empty data");
    std::sort(data.begin(), data.end());
    double n = static_cast<double>(data.size()), d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double f = cdf(data[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return {d, corrected_p(d, n), 0.0};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return {d, corrected_p(d, na * nb / (na + nb)), 0.0};
}

TestResult chi_square(std::span<const double> observed, std::span<const double> expected,
                      int fitted_parameters, double min_expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square: size mismatch");
    std::vector<std::pair<double, double>> cells;
    double o = 0.0, e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o += observed[i];
        e += expected[i];
        if (e >= min_expected) {
            cells.emplace_back(o, e);
            o = e = 0.0;
        }
    }
    if (e > 0 || o > 0) {
        if (cells.empty())
            cells.emplace_back(o, e);
        else {
            cells.back().first += o;
            cells.back().second += e;
        }
    }
    double stat = 0.0;
    for (auto [oo, ee] : cells) {
        if (ee > 0)
            stat += (oo - ee) * (oo - ee) / ee;
        else if (oo > 0)
            stat = INFINITY;
    }
    double dof = static_cast<double>(cells.size()) - 1.0 - fitted_parameters;
    if (dof < 1) return {stat, 1.0, 0.0};
    if (!std::isfinite(stat)) return {stat, 0.0, dof};
    boost::math::chi_squared dist(dof);
    return {stat, boost::math::cdf(boost::math::complement(dist, stat)), dof};
}

}  // namespace sirsn::stats
