#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crgeo/chart.hpp"

namespace crgeo {

// std::mt19937_64 with every variate derived from raw 64-bit draws, so the stream is the same on every
// standard library: uniform(a, b) = a + (b - a) * (x >> 11) * 2^-53, normal() by Box-Muller.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    double normal();
    // Point uniform in the box shrunk about its center by `fraction`.
    Vec<double> point(const Chart& chart, double fraction = 0.8);
    // Direction uniform on the unit sphere of the inner product G.
    Vec<double> unit(const Mat<double>& G);
    // Uniform in the G-ball of radius r.
    Vec<double> ball(const Mat<double>& G, double r);

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::vector<Vec<double>> sample_points(const Chart& chart, int count, std::uint64_t seed, double fraction = 0.8);

}  // namespace crgeo
