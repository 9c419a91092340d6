#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sirsn/fibre.hpp"
#include "sirsn/geodesics.hpp"

namespace sirsn::experiments {

struct ExperimentReport {
    std::string name;
    nlohmann::json parameters = nlohmann::json::object();
    std::size_t replicates = 0;
    nlohmann::json statistics = nlohmann::json::object();
    nlohmann::json thresholds = nlohmann::json::object();
    bool applicable = true;
    bool pass = false;
    std::vector<std::uint64_t> seeds;
    std::string note;

    nlohmann::json to_json() const;
    std::string status() const { return !applicable ? "not-applicable" : pass ? "pass" : "fail"; }
};

// Seeds of the replicates of one experiment.
std::vector<std::uint64_t> replicate_seeds(std::uint64_t seed, std::size_t n, std::uint64_t stream = 0);

// ---- scale equivariance ----
struct ScaleConfig {
    double target_lines = 300;  // expected line count, sets v0
    double window_radius = 1.0; // window radius at distance 1, scaled by s
    double epsilon_ratio = 0.25; // epsilon = ratio * v_floor
};
ExperimentReport scale_invariance_test(double gamma, double s, std::size_t n, std::uint64_t seed = kDefaultSeed,
                                       const ScaleConfig& cfg = {});

// ---- mean route length across a schedule ----
std::vector<ScheduleLevel> mean_length_schedule();
ExperimentReport mean_length_estimate(double gamma, double distance, const std::vector<ScheduleLevel>& schedule,
                                      std::size_t n, std::uint64_t seed = kDefaultSeed);

// ---- fibre length of routes between Poisson points ----
struct FibreConfig {
    double gamma = 3.0;
    Box window{{-1, -1}, {1, 1}};
    double v_floor = 0.25;
    double epsilon = 0.05;
};
struct FibreRealization {
    std::vector<Vec2> points;
    LineSample sample;
    std::vector<Route> routes;
    UnionLength lengths;
};
FibreRealization fibre_realization(double lambda, const FibreConfig& cfg, std::uint64_t seed);
ExperimentReport fibre_length(double lambda, const FibreConfig& cfg, std::size_t n, std::uint64_t seed = kDefaultSeed);
ExperimentReport fibre_length_sweep(const std::vector<double>& lambdas, const FibreConfig& cfg, std::size_t n,
                                    std::uint64_t seed = kDefaultSeed);

// ---- cost index law ----
struct CostSample {
    double c;
    double theta;
    double v;
};
std::vector<CostSample> cost_samples(double gamma, double w, std::size_t n_lines, double v_min, std::uint64_t seed);
// Mass of the transformed intensity over [t0,t1] x [c0,c1] restricted to speeds in [v_min, w).
double cost_cell_mass(double gamma, double w, double v_min, double t0, double t1, double c0, double c1);
ExperimentReport cost_density_validation(double gamma, double w, std::size_t n_lines, std::uint64_t seed = kDefaultSeed,
                                         double v_min_ratio = 0.125);

// ---- forcing structure ----
struct ForcingFixture {
    double a = 7, b = 14, c = 141;
    double gamma = 3.0;
    double background_floor = 0.25;
    Disk clip{{0, 2}, 9};
    double epsilon = 0.01;

    bool applicable() const;
    std::vector<MarkedLine> structure(std::uint64_t first_id) const;
    // background lines (speeds <= 1 wherever they meet the big square) plus the nine structural lines
    LineSample sample(std::uint64_t seed) const;
};
constexpr Vec2 kForcingA{0, -1};
constexpr Vec2 kForcingB{0, -3};
double distance_to_route(const Route& r, Vec2 p);
ExperimentReport forcing_fixture_test(const ForcingFixture& f, std::size_t n_pairs, std::uint64_t seed = kDefaultSeed);

// ---- coalescence diagnostic ----
double shared_prefix_time(const ArrangementGraph& g, const Route& a, const Route& b);
ExperimentReport coalescence_probe(Vec2 x, Vec2 y, Vec2 z, const std::vector<ScheduleLevel>& schedule, std::size_t n,
                                   std::uint64_t seed = kDefaultSeed, double gamma = 3.0);

// ---- laws of the line process and the comparison chain ----
ExperimentReport fastest_line_law(double gamma, double radius, double v_floor, std::size_t n,
                                  std::uint64_t seed = kDefaultSeed);
ExperimentReport perpetuity_mean(int d, std::size_t steps, std::size_t burn_in, std::uint64_t seed = kDefaultSeed);
ExperimentReport escape_dichotomy(std::size_t trajectories, std::uint64_t seed = kDefaultSeed);

// ---- two-cluster network figure ----
struct NetworkConfig {
    std::vector<Vec2> cluster_a;
    std::vector<Vec2> cluster_b;
    Disk window{{0, 0}, 2.0};
    double target_lines = 300;
    double epsilon_ratio = 0.25;
};
NetworkConfig default_network(std::uint64_t seed, std::size_t per_cluster = 6);
struct NetworkResult {
    double gamma = 0;
    LineSample sample;
    std::vector<Route> routes;
    UnionLength lengths;
    // length travelled more than once (sum minus union) per unit of union length
    double sharing() const {
        return lengths.union_length > 0 ? (lengths.sum_length - lengths.union_length) / lengths.union_length : 0.0;
    }
};
NetworkResult network_routes(double gamma, const NetworkConfig& cfg, std::uint64_t seed);
ExperimentReport route_sharing_trend(const std::vector<double>& gammas, std::size_t n_seeds,
                                     std::uint64_t seed = kDefaultSeed, std::size_t per_cluster = 6);

// ---- registry used by the command line ----
using Runner = std::function<ExperimentReport(const nlohmann::json& args, std::uint64_t seed)>;
const std::map<std::string, Runner>& registry();

}  // namespace sirsn::experiments
