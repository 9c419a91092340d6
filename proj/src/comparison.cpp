#include "sirsn/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace sirsn::comparison {

namespace {
constexpr double kLn2 = 0.693147180559945309417232121458176568;

Wide normalized(double m, std::int64_t e) {
    if (m == 0) return {};
    int k = 0;
    double f = std::frexp(m, &k);
    return {f, e + k};
}
}  // namespace

Wide Wide::of(double x) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("Wide: value must be finite and nonnegative");
    return normalized(x, 0);
}

Wide Wide::from_log(double L) {
    if (L == -INFINITY) return {};
    double l2 = L / kLn2;
    double fl = std::floor(l2);
    return normalized(std::exp2(l2 - fl), static_cast<std::int64_t>(fl));
}

double Wide::value() const {
    if (m == 0) return 0.0;
    if (e > 2000) return INFINITY;
    if (e < -2000) return 0.0;
    return std::ldexp(m, static_cast<int>(e));
}

double Wide::log() const { return m == 0 ? -INFINITY : std::log(m) + static_cast<double>(e) * kLn2; }

Wide Wide::pow(double p) const {
    if (p == 1) return *this;
    if (m == 0) return {};
    double l2 = p * (std::log2(m) + static_cast<double>(e));
    double fl = std::floor(l2);
    return normalized(std::exp2(l2 - fl), static_cast<std::int64_t>(fl));
}

std::string Wide::str() const {
    if (m == 0) return "0";
    double l10 = std::log10(m) + static_cast<double>(e) * 0.301029995663981195213738894724493027;
    double ex = std::floor(l10);
    double mant = std::pow(10.0, l10 - ex);
    if (mant >= 10) mant /= 10, ex += 1;
    return fmt::format("{:.15g}e{}{:02.0f}", mant, ex < 0 ? '-' : '+', std::abs(ex));
}

Wide operator*(Wide a, Wide b) { return normalized(a.m * b.m, a.e + b.e); }

Wide operator/(Wide a, Wide b) {
    if (b.m == 0) throw std::domain_error("Wide: division by zero");
    return normalized(a.m / b.m, a.e - b.e);
}

Wide operator+(Wide a, Wide b) {
    if (a.m == 0) return b;
    if (b.m == 0) return a;
    if (a.e < b.e) std::swap(a, b);
    std::int64_t shift = b.e - a.e;
    if (shift < -1100) return a;
    return normalized(a.m + std::ldexp(b.m, static_cast<int>(shift)), a.e);
}

double unit_ball_volume(double s) { return std::pow(3.141592653589793238462643383279502884, s / 2) / std::tgamma(1 + s / 2); }

ComparisonParams ComparisonParams::make(int d, double gamma, double r0) {
    if (d < 2) throw std::invalid_argument("comparison: dimension must be at least 2");
    if (!(gamma > 1)) throw std::invalid_argument("comparison: gamma must exceed 1");
    if (!(r0 > 0)) throw std::invalid_argument("comparison: r0 must be positive");
    return {d, gamma, r0, d * unit_ball_volume(d)};
}

PerpetuityState init(const ComparisonParams& p, Rng& rng) {
    if (!(p.r0 > 0)) throw std::invalid_argument("comparison: r0 must be positive");
    PerpetuityState s;
    double P0 = std::pow(p.r0, p.d - 1);
    double S0 = rng.exponential(p.omega / 2 * P0);
    s.P = Wide::of(P0);
    s.S = Wide::of(S0);
    s.X = S0 * P0;
    return s;
}

PerpetuityState step_with(const PerpetuityState& s, double T, double U) {
    PerpetuityState n;
    n.n = s.n + 1;
    n.P = s.P + Wide::of(T) / s.S;
    n.S = Wide::of(U) * s.S;
    n.X = U * (T + s.X);
    double sp = (n.S * n.P).value();
    if (std::abs(sp - n.X) > 1e-12 * std::max(std::abs(n.X), std::abs(sp)))
        throw std::logic_error(fmt::format("perpetuity drift at step {}: X={} but S*P={}", n.n, n.X, sp));
    return n;
}

PerpetuityState step(const PerpetuityState& s, const ComparisonParams& p, Rng& rng) {
    double T = rng.exponential(p.omega / 2);
    double U = rng.uniform_pos();
    return step_with(s, T, U);
}

std::vector<TraceRow> trace(const ComparisonParams& p, std::size_t n_steps, Rng& rng) {
    std::vector<TraceRow> rows;
    rows.reserve(n_steps + 1);
    PerpetuityState s = init(p, rng);
    rows.push_back({s, {}});
    Wide sum;
    const double a = 1.0 / (p.gamma - 1), b = 1.0 / (p.d - 1);
    for (std::size_t k = 0; k < n_steps; ++k) {
        double T = rng.exponential(p.omega / 2);
        double U = rng.uniform_pos();
        PerpetuityState n = step_with(s, T, U);
        // S^a (P'^b - P^b) = S^a P^b ((1 + T/X)^b - 1), summed in logs
        double inc = std::expm1(b * std::log1p(T / s.X));
        if (inc > 0) sum = sum + Wide::from_log(a * s.S.log() + b * s.P.log() + std::log(inc));
        rows.push_back({n, sum});
        s = n;
    }
    return rows;
}

std::vector<Wide> escape_time_partial_sum(const ComparisonParams& p, std::size_t n_steps, Rng& rng) {
    if (n_steps < 1) throw std::invalid_argument("escape_time_partial_sum: need at least one step");
    auto rows = trace(p, n_steps, rng);
    std::vector<Wide> out;
    out.reserve(n_steps);
    for (std::size_t k = 1; k < rows.size(); ++k) out.push_back(rows[k].partial_sum);
    return out;
}

std::string to_csv(const std::vector<TraceRow>& rows) {
    std::string out = "n,P,S,X,partial_sum\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{:.17g},{}\n", r.state.n, r.state.P.str(), r.state.S.str(), r.state.X,
                           r.partial_sum.str());
    return out;
}

double Envelope::operator()(double time) const {
    if (t.empty()) return 0.0;
    auto it = std::upper_bound(t.begin(), t.end(), time);
    std::size_t k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    return y[k] + slope[k] * std::max(0.0, time - t[k]);
}

Envelope envelope(const LineSample& sample, double r0, double floor_speed) {
    if (!(r0 > 0)) throw std::invalid_argument("envelope: r0 must be positive");
    std::vector<std::pair<double, double>> dv;  // (distance from origin, speed)
    for (const auto& m : sample.lines) dv.emplace_back(std::abs(m.line.r), m.v);
    std::sort(dv.begin(), dv.end());
    double vbar = floor_speed;
    std::size_t k = 0;
    for (; k < dv.size() && dv[k].first <= r0; ++k) vbar = std::max(vbar, dv[k].second);
    Envelope env{{0.0}, {r0}, {vbar}};
    for (; k < dv.size(); ++k) {
        if (dv[k].second <= env.slope.back()) continue;
        if (env.slope.back() == 0) break;
        double dt = (dv[k].first - env.y.back()) / env.slope.back();
        env.t.push_back(env.t.back() + dt);
        env.y.push_back(dv[k].first);
        env.slope.push_back(dv[k].second);
    }
    return env;
}

}  // namespace sirsn::comparison
