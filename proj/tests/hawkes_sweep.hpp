#pragma once

// Hawkes-coupled scenario family shared by the acceptance suite and the
// pilot tool: mu = 1, beta = 2, alpha = ratio * beta, exponential
// protections up(0.05) / down(2.0), horizon 5000.

#include <cstdint>
#include <vector>

#include "cdflab/simulator.hpp"

namespace cdflab::test
{

inline constexpr std::uint64_t pilot_seed = 0x5eed'b1a5'2024ULL;
inline constexpr int pilot_replications = 2000;

struct HawkesSweepPoint
{
    double ratio;
    double q;
};

inline std::vector<HawkesSweepPoint> hawkes_sweep_points()
{
    std::vector<HawkesSweepPoint> points;
    for (double ratio : {0.2, 0.4, 0.6})
        for (double q : {0.05, 0.1, 0.2})
            points.push_back({ratio, q});
    return points;
}

inline Scenario hawkes_sweep_scenario(double ratio, double q, std::uint64_t seed = 0)
{
    constexpr double beta = 2.0;
    Scenario s{IntensityModel::hawkes(1.0, ratio * beta, beta),
               ProtectionModel(Distribution::exponential(0.05), Distribution::exponential(2.0), q)};
    s.horizon = 5000.0;
    s.base_seed = seed;
    return s;
}

}  // namespace cdflab::test
