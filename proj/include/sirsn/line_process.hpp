#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sirsn/geometry.hpp"
#include "sirsn/random.hpp"

namespace sirsn {

struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProcessParams {
    double gamma = 3.0;
    std::uint64_t seed = kDefaultSeed;

    void validate() const;
};

struct MarkedLine {
    Line line;
    double v = 1.0;
    std::uint64_t id = 0;
};

struct LineSample {
    ProcessParams params;
    Disk window;
    double v_floor = 1.0;
    std::vector<MarkedLine> lines;
    // number of speed bands drawn so far (1 after sample, +1 per refine)
    std::uint32_t bands = 1;
    std::uint64_t next_id = 0;

    const MarkedLine* find(std::uint64_t id) const;
};

// Expected-count cap; SIRSN_MAX_LINES in the environment overrides the default 1e6.
double line_count_cap();

double expected_line_count(double gamma, double radius, double v_floor);

LineSample sample(const ProcessParams& params, const Disk& window, double v_floor);
LineSample refine(const LineSample& s, double new_v_floor);
LineSample scale(const LineSample& s, double factor);
double speed_limit_at(const LineSample& s, Vec2 x, double tol);

// Restrict to lines with speed >= v (the coupled coarser sample).
LineSample filter_floor(const LineSample& s, double v);
// Checks the per-sample invariants; throws std::logic_error on violation.
void check_sample(const LineSample& s);

std::string to_json(const LineSample& s);
LineSample sample_from_json(const std::string& text);

}  // namespace sirsn
