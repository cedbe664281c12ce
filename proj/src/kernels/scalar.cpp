#include <algorithm>
#include <cmath>

#include "cdflab/kernels/kernels.hpp"

namespace cdflab::kernels::scalar
{

void exp(const double* x, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] < -708.0 ? 0.0 : std::exp(x[i]);
}

void decay_intensity(double base, double excitation, double decay,
                     const double* elapsed, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
    {
        const double arg = -decay * elapsed[i];
        out[i] = base + excitation * (arg < -708.0 ? 0.0 : std::exp(arg));
    }
}

double exponential_ks_statistic(const double* sorted, std::size_t n)
{
    if (n == 0)
        return 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    double d_plus = 0.0;
    double d_minus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double cdf = -std::expm1(-sorted[i]);
        const double idx = static_cast<double>(i);
        d_plus = std::max(d_plus, (idx + 1.0) * inv_n - cdf);
        d_minus = std::max(d_minus, cdf - idx * inv_n);
    }
    return std::max(d_plus, d_minus);
}

}  // namespace cdflab::kernels::scalar
