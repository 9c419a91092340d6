#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sirsn/line_process.hpp"
#include "sirsn/random.hpp"

namespace sirsn::comparison {

// Nonnegative real m * 2^e with an unbounded exponent; used where P and S under/overflow doubles.
struct Wide {
    double m = 0.0;  // 0 or in [0.5, 1)
    std::int64_t e = 0;

    static Wide of(double x);
    static Wide from_log(double log_value);
    double value() const;  // may be inf or 0
    double log() const;    // natural log, -inf for 0
    Wide pow(double p) const;
    std::string str() const;  // decimal scientific notation
};

Wide operator*(Wide a, Wide b);
Wide operator/(Wide a, Wide b);
Wide operator+(Wide a, Wide b);

// Volume of the unit ball in dimension s.
double unit_ball_volume(double s);

struct ComparisonParams {
    int d = 2;
    double gamma = 2.0;
    double r0 = 1.0;
    double omega = 0.0;  // surface area of the unit sphere in R^d

    static ComparisonParams make(int d, double gamma, double r0);
};

struct PerpetuityState {
    std::uint64_t n = 0;
    Wide P;  // generalised distance
    Wide S;  // meta-slowness
    double X = 0.0;
};

PerpetuityState init(const ComparisonParams& p, Rng& rng);
PerpetuityState step(const PerpetuityState& s, const ComparisonParams& p, Rng& rng);
// Deterministic transition for given injection T and contraction U.
PerpetuityState step_with(const PerpetuityState& s, double T, double U);

std::vector<Wide> escape_time_partial_sum(const ComparisonParams& p, std::size_t n_steps, Rng& rng);

struct TraceRow {
    PerpetuityState state;
    Wide partial_sum;
};
std::vector<TraceRow> trace(const ComparisonParams& p, std::size_t n_steps, Rng& rng);
std::string to_csv(const std::vector<TraceRow>& rows);

// y(0) = r0, y' = max speed of lines within distance y of the origin (at least floor_speed).
struct Envelope {
    std::vector<double> t;      // breakpoints
    std::vector<double> y;      // values at breakpoints
    std::vector<double> slope;  // slope after each breakpoint
    double operator()(double time) const;
};

Envelope envelope(const LineSample& sample, double r0, double floor_speed = 0.0);

}  // namespace sirsn::comparison
