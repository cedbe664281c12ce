#include "cdflab/ks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cdflab/errors.hpp"
#include "cdflab/kernels/kernels.hpp"

namespace cdflab
{
namespace
{

// Square matrices carried with a decimal exponent so the n-th power does
// not overflow: value = m * 10^exponent.
struct ScaledMatrix
{
    std::vector<double> m;
    int exponent = 0;
};

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b, int size)
{
    std::vector<double> c(a.size(), 0.0);
    for (int i = 0; i < size; ++i)
        for (int k = 0; k < size; ++k)
        {
            const double aik = a[i * size + k];
            if (aik == 0.0)
                continue;
            for (int j = 0; j < size; ++j)
                c[i * size + j] += aik * b[k * size + j];
        }
    return c;
}

void rescale(ScaledMatrix& x, int size)
{
    if (x.m[(size / 2) * size + size / 2] > 1e140)
    {
        for (double& v : x.m)
            v *= 1e-140;
        x.exponent += 140;
    }
}

ScaledMatrix power(const ScaledMatrix& base, int size, int n)
{
    if (n == 1)
        return base;
    ScaledMatrix half = power(base, size, n / 2);
    ScaledMatrix result{multiply(half.m, half.m, size), 2 * half.exponent};
    if (n % 2 == 1)
    {
        result.m = multiply(base.m, result.m, size);
        result.exponent += base.exponent;
    }
    rescale(result, size);
    return result;
}

}  // namespace

double kolmogorov_cdf_exact(int n, double d)
{
    if (n <= 0)
        throw ContractViolation("kolmogorov_cdf_exact: n must be positive");
    // D_n >= 1/(2n) always.
    if (d <= 0.5 / n)
        return 0.0;
    if (d >= 1.0)
        return 1.0;

    const int k = static_cast<int>(n * d) + 1;
    const int m = 2 * k - 1;
    const double h = k - n * d;

    std::vector<double> hm(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            hm[i * m + j] = (i - j + 1 < 0) ? 0.0 : 1.0;
    for (int i = 0; i < m; ++i)
    {
        hm[i * m] -= std::pow(h, i + 1);
        hm[(m - 1) * m + i] -= std::pow(h, m - i);
    }
    hm[(m - 1) * m] += (2 * h - 1 > 0) ? std::pow(2 * h - 1, m) : 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g)
                    hm[i * m + j] /= g;

    ScaledMatrix q = power(ScaledMatrix{hm, 0}, m, n);
    double s = q.m[(k - 1) * m + k - 1];
    int exponent = q.exponent;
    for (int i = 1; i <= n; ++i)
    {
        s = s * i / n;
        if (s < 1e-140)
        {
            s *= 1e140;
            exponent -= 140;
        }
    }
    return std::clamp(s * std::pow(10.0, exponent), 0.0, 1.0);
}

double kolmogorov_sf_asymptotic(double x)
{
    if (x <= 0)
        return 1.0;
    if (x < 1.0)
    {
        // Jacobi-theta form converges fast for small x.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 20; ++k)
        {
            const double odd = 2.0 * k - 1.0;
            cdf += std::exp(-odd * odd * pi2 / (8.0 * x * x));
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sf = 0.0;
    for (int k = 1; k <= 100; ++k)
    {
        const double term = std::exp(-2.0 * k * k * x * x);
        sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-300)
            break;
    }
    return std::clamp(sf, 0.0, 1.0);
}

double ks_p_value(std::size_t n, double statistic)
{
    if (n == 0)
        throw ContractViolation("ks_p_value: empty sample");
    if (n >= 35)
        return kolmogorov_sf_asymptotic(std::sqrt(static_cast<double>(n)) * statistic);
    return std::clamp(1.0 - kolmogorov_cdf_exact(static_cast<int>(n), statistic), 0.0, 1.0);
}

KsResult ks_test_unit_exponential(std::span<const double> samples)
{
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    KsResult result;
    result.n = sorted.size();
    result.statistic = kernels::exponential_ks_statistic(sorted);
    result.p_value = ks_p_value(result.n, result.statistic);
    return result;
}

}  // namespace cdflab
