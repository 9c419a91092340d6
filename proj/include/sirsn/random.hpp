#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace sirsn {

constexpr std::uint64_t kDefaultSeed = 20140406ULL;

std::uint64_t splitmix64(std::uint64_t& state);

// Child seed for a labelled sub-stream: derive_seed(seed, {band, replicate, ...}).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
std::uint64_t tag(std::string_view name);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform on [0, 1)
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // uniform on (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }
    std::uint64_t poisson(double mean);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace sirsn
