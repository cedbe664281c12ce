#include <doctest.h>

#include <cmath>
#include <span>
#include <vector>

#include "cdflab/errors.hpp"
#include "cdflab/intensity.hpp"
#include "cdflab/quadrature.hpp"
#include "cdflab/rng.hpp"

using namespace cdflab;

namespace
{

IntensityState after_event_at_zero(const IntensityModel& m)
{
    return excite(m, IntensityState{}, 0.0);
}

// Reference integral by direct quadrature of the point evaluation.
double quadrature_integral(const IntensityModel& m, const IntensityState& s, double a, double b)
{
    auto f = [&](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = evaluate(m, s, x[i] - s.time);
    };
    return integrate_adaptive(f, a, b, 1e-13).value;
}

std::vector<IntensityModel> sample_models()
{
    return {IntensityModel::poisson(2.0), IntensityModel::hawkes(1.0, 0.8, 2.0),
            IntensityModel::hawkes(0.3, 5.0, 5.5), IntensityModel::state_modulated(1.0, 5.0)};
}

}  // namespace

TEST_CASE("Hawkes intensity after one event")
{
    const auto m = IntensityModel::hawkes(1.0, 0.8, 2.0);
    const auto s = after_event_at_zero(m);
    CHECK(evaluate(m, s, 0.5) == doctest::Approx(1.29430355293715386).epsilon(1e-14));
    CHECK(integrate_segment(m, s, 0.0, 0.5)
          == doctest::Approx(0.752848223531423071).epsilon(1e-14));
    const auto twice = excite(m, s, 0.5);
    CHECK(twice.excitation == doctest::Approx(1.09430355293715386).epsilon(1e-14));
    CHECK(evaluate(m, twice, 0.0) == doctest::Approx(2.09430355293715386).epsilon(1e-14));
}

TEST_CASE("Poisson and state-modulated intensities")
{
    const auto p = IntensityModel::poisson(2.5);
    CHECK(evaluate(p, {}, 100.0) == 2.5);
    CHECK(integrate_segment(p, {}, 1.0, 5.0) == 10.0);
    CHECK(excite(p, {}, 3.0).excitation == 0.0);

    const auto sm = IntensityModel::state_modulated(1.0, 5.0);
    CHECK(evaluate(sm, IntensityState{0, 1, 0}, 0.0) == 1.0);
    CHECK(evaluate(sm, IntensityState{0, 0, 0}, 0.0) == 5.0);
    CHECK(integrate_segment(sm, IntensityState{0, 0, 0}, 0.0, 2.0) == 10.0);
}

TEST_CASE("intensity factories validate parameters")
{
    CHECK_THROWS_AS(IntensityModel::poisson(0.0), ValidationError);
    CHECK_THROWS_AS(IntensityModel::poisson(INFINITY), ValidationError);
    CHECK_THROWS_AS(IntensityModel::state_modulated(1.0, -1.0), ValidationError);
    try
    {
        IntensityModel::hawkes(1.0, 2.4, 2.0);
        FAIL("expected rejection");
    }
    catch (const ValidationError& e)
    {
        CHECK(e.field() == "intensity.alpha");
        CHECK(std::string(e.what()).find("non-stationary Hawkes") != std::string::npos);
    }
    CHECK_THROWS_AS(IntensityModel::hawkes(1.0, 2.0, 2.0), ValidationError);
    const auto relaxed =
        IntensityModel::hawkes(1.0, 2.4, 2.0, IntensityModel::Stationarity::relaxed);
    CHECK(relaxed.branching_ratio() == doctest::Approx(1.2));
}

TEST_CASE("segment integrals are additive")
{
    RngStream rng(8, 0);
    for (const auto& m : sample_models())
    {
        for (int trial = 0; trial < 200; ++trial)
        {
            IntensityState s{5.0 * rng.uniform_open(), rng.uniform_open() < 0.5 ? 0 : 1,
                             3.0 * rng.uniform_open()};
            const double a = s.time + rng.uniform_open();
            const double c = a + 10 * rng.uniform_open();
            const double b = a + (c - a) * rng.uniform_open();
            const double whole = integrate_segment(m, s, a, c);
            const double parts = integrate_segment(m, s, a, b) + integrate_segment(m, s, b, c);
            CHECK(std::abs(whole - parts) <= 1e-12 * std::max(1.0, std::abs(whole)));
        }
    }
}

TEST_CASE("upper bound dominates the intensity until the next state change")
{
    RngStream rng(9, 0);
    for (const auto& m : sample_models())
    {
        for (int probe = 0; probe < 10000; ++probe)
        {
            IntensityState s{10.0 * rng.uniform_open(), rng.uniform_open() < 0.5 ? 0 : 1, 0.0};
            const double elapsed = 20.0 * rng.uniform_open();
            CHECK(evaluate(m, s, elapsed) <= upper_bound(m, s));
        }
    }
}

TEST_CASE("closed-form compensator agrees with quadrature")
{
    RngStream rng(10, 0);
    int worst_exceeded = 0;
    for (const auto& m : sample_models())
    {
        for (int segment = 0; segment < 1000; ++segment)
        {
            IntensityState s{8.0 * rng.uniform_open(), rng.uniform_open() < 0.5 ? 0 : 1,
                             rng.uniform_open()};
            const double a = s.time + 2.0 * rng.uniform_open();
            const double b = a + 5.0 * rng.uniform_open();
            const double closed = integrate_segment(m, s, a, b);
            const double numeric = quadrature_integral(m, s, a, b);
            if (std::abs(closed - numeric) > 1e-9 * std::max(std::abs(numeric), 1e-300))
                ++worst_exceeded;
        }
    }
    CHECK(worst_exceeded == 0);
}

TEST_CASE("advance decays excitation and refuses to go backwards")
{
    const auto m = IntensityModel::hawkes(1.0, 0.8, 2.0);
    const auto s = after_event_at_zero(m);
    const auto later = advance(m, s, 1.0);
    CHECK(later.excitation == doctest::Approx(0.8 * std::exp(-2.0)));
    CHECK(later.time == 1.0);
    CHECK_THROWS_AS(advance(m, later, 0.5), ContractViolation);
    CHECK_THROWS_AS(integrate_segment(m, later, 0.5, 2.0), ContractViolation);
    CHECK_THROWS_AS(integrate_segment(m, later, 3.0, 2.0), ContractViolation);
}
