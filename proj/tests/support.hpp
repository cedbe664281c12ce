#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cdflab/simulator.hpp"

namespace cdflab::test
{

inline Scenario poisson_scenario(double lambda, double fail, double repair, double q,
                                 double horizon, std::uint64_t seed)
{
    Scenario s{IntensityModel::poisson(lambda),
               ProtectionModel(Distribution::exponential(fail), Distribution::exponential(repair), q)};
    s.horizon = horizon;
    s.base_seed = seed;
    return s;
}

inline Scenario never_failing(IntensityModel intensity, double horizon, std::uint64_t seed)
{
    Scenario s{intensity, ProtectionModel(Distribution::deterministic(1e300),
                                          Distribution::deterministic(1.0), 0.0)};
    s.horizon = horizon;
    s.base_seed = seed;
    return s;
}

inline double mean(const std::vector<double>& v)
{
    double sum = 0;
    for (double x : v)
        sum += x;
    return sum / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v)
{
    const double m = mean(v);
    double ss = 0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace cdflab::test

namespace cdflab::test
{

inline Scenario hawkes_like(std::uint64_t seed = 21)
{
    Scenario s{IntensityModel::hawkes(1.0, 0.8, 2.0),
               ProtectionModel(Distribution::exponential(0.05), Distribution::exponential(2.0), 0.1)};
    s.horizon = 2000.0;
    s.base_seed = seed;
    return s;
}

}  // namespace cdflab::test
