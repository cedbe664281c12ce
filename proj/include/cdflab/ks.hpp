#pragma once

#include <cstddef>
#include <span>

namespace cdflab
{

// P(D_n < d) for the one-sample Kolmogorov statistic with n observations,
// by the Marsaglia-Tsang-Wang matrix-power recursion.
double kolmogorov_cdf_exact(int n, double d);

// P(K > x) for the limiting Kolmogorov distribution.
double kolmogorov_sf_asymptotic(double x);

// Two-sided KS p-value: asymptotic for n >= 35, exact below.
double ks_p_value(std::size_t n, double statistic);

struct KsResult
{
    double statistic = 0;
    double p_value = 1;
    std::size_t n = 0;
};

// One-sample KS test of `samples` against the unit-mean exponential law.
KsResult ks_test_unit_exponential(std::span<const double> samples);

}  // namespace cdflab
