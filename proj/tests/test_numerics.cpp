#include <doctest.h>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "cdflab/errors.hpp"
#include "cdflab/ks.hpp"
#include "cdflab/quadrature.hpp"
#include "cdflab/rng.hpp"

using namespace cdflab;

namespace
{

template <class F>
auto batch(F f)
{
    return [f](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = f(x[i]);
    };
}

}  // namespace

TEST_CASE("adaptive quadrature reproduces closed-form integrals")
{
    CHECK(integrate_adaptive(batch([](double x) { return std::exp(-x); }), 0, 10).value
          == doctest::Approx(-std::expm1(-10.0)).epsilon(1e-14));
    CHECK(integrate_adaptive(batch([](double x) { return std::sin(x); }), 0, std::numbers::pi)
              .value
          == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(integrate_adaptive(batch([](double x) { return x * x * x - 2 * x; }), -1, 3).value
          == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(integrate_adaptive(batch([](double x) { return 1.0 / std::sqrt(x); }), 1e-12, 1,
                             1e-10)
              .value
          == doctest::Approx(2.0 - 2e-6).epsilon(1e-9));
}

TEST_CASE("adaptive quadrature contract")
{
    auto one = batch([](double) { return 1.0; });
    CHECK(integrate_adaptive(one, 2, 2).value == 0.0);
    CHECK_THROWS_AS(integrate_adaptive(one, 3, 2), ContractViolation);
}

TEST_CASE("exact Kolmogorov distribution matches reference values")
{
    CHECK(kolmogorov_cdf_exact(10, 0.274) == doctest::Approx(0.6284796154565043).epsilon(1e-12));
    CHECK(1 - kolmogorov_cdf_exact(20, 0.3) == doctest::Approx(0.04306706665851623).epsilon(1e-10));
    CHECK(1 - kolmogorov_cdf_exact(100, 0.1) == doctest::Approx(0.2526927570063874).epsilon(1e-9));
    // n = 1: P(D < d) = 2d - 1 on [1/2, 1].
    CHECK(kolmogorov_cdf_exact(1, 0.8) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(kolmogorov_cdf_exact(5, 0.05) == 0.0);
    CHECK(kolmogorov_cdf_exact(5, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("asymptotic Kolmogorov tail matches reference values")
{
    CHECK(kolmogorov_sf_asymptotic(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
    CHECK(kolmogorov_sf_asymptotic(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
    CHECK(kolmogorov_sf_asymptotic(1.628) == doctest::Approx(0.009975522431181053).epsilon(1e-10));
    CHECK(kolmogorov_sf_asymptotic(0.0) == 1.0);
    CHECK(kolmogorov_sf_asymptotic(10.0) < 1e-80);
    // The two series branches meet smoothly.
    CHECK(kolmogorov_sf_asymptotic(1.0 - 1e-12)
          == doctest::Approx(kolmogorov_sf_asymptotic(1.0 + 1e-12)).epsilon(1e-10));
}

TEST_CASE("KS p-values are monotone in the statistic")
{
    for (std::size_t n : {10u, 34u, 35u, 500u})
    {
        double previous = 1.0;
        for (double d = 0.005; d < 0.6; d += 0.005)
        {
            const double p = ks_p_value(n, d);
            CHECK(p <= previous + 1e-12);
            CHECK(p >= 0.0);
            previous = p;
        }
    }
}

TEST_CASE("unit-exponential KS test is calibrated")
{
    int rejections = 0;
    constexpr int trials = 1000;
    for (int t = 0; t < trials; ++t)
    {
        RngStream rng(2024, static_cast<std::uint64_t>(t));
        std::vector<double> xs(25 + t % 50);
        for (auto& x : xs)
            x = -std::log(rng.uniform_open());
        if (ks_test_unit_exponential(xs).p_value < 0.05)
            ++rejections;
    }
    // Binomial(1000, 0.05): mean 50, sd 6.9.
    CHECK(rejections > 29);
    CHECK(rejections < 71);
}

TEST_CASE("unit-exponential KS test detects a rate error")
{
    RngStream rng(1, 1);
    std::vector<double> xs(400);
    for (auto& x : xs)
        x = -std::log(rng.uniform_open()) * 2.0;
    const auto result = ks_test_unit_exponential(xs);
    CHECK(result.n == 400);
    CHECK(result.p_value < 1e-6);
}
