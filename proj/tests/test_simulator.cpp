#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cdflab/errors.hpp"
#include "cdflab/inference.hpp"
#include "cdflab/ks.hpp"
#include "cdflab/simulator.hpp"
#include "support.hpp"

using namespace cdflab;
using test::poisson_scenario;

namespace
{

void check_path_invariants(const Trajectory& t)
{
    double previous = 0;
    int flag = t.starts_down ? 0 : 1;
    std::int64_t events = 0, damage = 0;
    for (const auto& e : t.events)
    {
        CHECK(e.time > previous);
        CHECK(e.time < t.horizon + 1e-12);
        previous = e.time;
        switch (e.kind)
        {
            case EventKind::initiating_event:
                ++events;
                damage += e.is_damage;
                CHECK(e.left_limit_flag == flag);
                if (!t.damage_on_caused_failure)
                    CHECK(e.is_damage == (e.left_limit_flag == 0));
                if (e.caused_failure)
                {
                    CHECK(flag == 1);
                    flag = 0;
                }
                break;
            case EventKind::protection_down:
                CHECK(flag == 1);
                flag = 0;
                break;
            case EventKind::protection_up:
                CHECK(flag == 0);
                flag = 1;
                break;
        }
    }
    CHECK(events == t.event_count);
    CHECK(damage == t.damage_count);
    CHECK(t.damage_count <= t.event_count);
    CHECK(t.lambda_damage <= t.lambda_total * (1 + 1e-12));
    CHECK(t.uptime_integral >= 0.0);
    CHECK(t.uptime_integral <= t.horizon * (1 + 1e-12));
}

}  // namespace

TEST_CASE("tie between an arrival and a transition goes to the transition")
{
    CHECK(next_step(3.0, 3.0, 10.0) == StepKind::transition);
    CHECK(next_step(2.0, 3.0, 10.0) == StepKind::candidate);
    CHECK(next_step(4.0, 3.0, 10.0) == StepKind::transition);
    CHECK(next_step(10.0, 11.0, 10.0) == StepKind::horizon);
    CHECK(next_step(12.0, 10.0, 10.0) == StepKind::horizon);
}

TEST_CASE("simulation is reproducible and identity excludes the seed")
{
    const auto s = poisson_scenario(2.0, 0.1, 10.0, 0.05, 500.0, 77);
    const auto a = simulate(s, 3);
    const auto b = simulate(s, 3);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i)
    {
        CHECK(a.events[i].time == b.events[i].time);
        CHECK(a.events[i].kind == b.events[i].kind);
    }
    CHECK(a.lambda_damage == b.lambda_damage);
    CHECK(a.uptime_integral == b.uptime_integral);

    auto reseeded = s;
    reseeded.base_seed = 78;
    CHECK(scenario_identity(reseeded) == scenario_identity(s));
    auto other = s;
    other.protection = ProtectionModel(Distribution::exponential(0.1),
                                       Distribution::exponential(10.0), 0.06);
    CHECK(scenario_identity(other) != scenario_identity(s));
}

TEST_CASE("scenario validation")
{
    auto s = poisson_scenario(2.0, 0.1, 10.0, 0.0, 100.0, 1);
    s.horizon = 0;
    CHECK_THROWS_AS(simulate(s, 0), ValidationError);
    s.horizon = INFINITY;
    CHECK_THROWS_AS(validate(s), ValidationError);
    s.horizon = 10;
    s.mixture_rates = {1.0, -2.0};
    CHECK_THROWS_AS(validate(s), ValidationError);
}

TEST_CASE("event kind tags round trip")
{
    for (auto k : {EventKind::initiating_event, EventKind::protection_down,
                   EventKind::protection_up})
        CHECK(parse_event_kind(event_kind_tag(k)) == k);
    CHECK_FALSE(parse_event_kind("BOGUS").has_value());
}

TEST_CASE("trajectories respect counting and protection invariants")
{
    std::vector<Scenario> scenarios = {
        poisson_scenario(2.0, 0.1, 10.0, 0.0, 300.0, 1),
        poisson_scenario(2.0, 0.5, 1.0, 0.3, 300.0, 2),
        test::hawkes_like(),
    };
    auto sm = poisson_scenario(1.0, 0.1, 1.0, 0.2, 300.0, 3);
    sm.intensity = IntensityModel::state_modulated(1.0, 5.0);
    scenarios.push_back(sm);
    auto weib = poisson_scenario(3.0, 1.0, 1.0, 0.1, 300.0, 4);
    weib.protection = ProtectionModel(Distribution::weibull(1.7, 3.0),
                                      Distribution::deterministic(0.5), 0.1);
    scenarios.push_back(weib);
    auto caused = poisson_scenario(2.0, 0.1, 2.0, 0.2, 300.0, 5);
    caused.damage_on_caused_failure = true;
    scenarios.push_back(caused);

    for (const auto& s : scenarios)
        for (std::uint64_t rep = 0; rep < 20; ++rep)
            check_path_invariants(simulate(s, rep));
}

TEST_CASE("checkpoint grid ends at the horizon with the path totals")
{
    const auto s = poisson_scenario(2.0, 0.1, 10.0, 0.0, 1000.0, 9);
    const auto t = simulate(s, 0);
    REQUIRE(t.checkpoint_grid.size() == 512);
    const auto& last = t.checkpoint_grid.back();
    CHECK(last.time == 1000.0);
    CHECK(last.events == t.event_count);
    CHECK(last.damage_events == t.damage_count);
    CHECK(last.compensator_total == doctest::Approx(t.lambda_total).epsilon(1e-12));
    CHECK(last.compensator_damage == doctest::Approx(t.lambda_damage).epsilon(1e-12));
    CHECK(last.downtime == doctest::Approx(t.horizon - t.uptime_integral).epsilon(1e-9));
    for (std::size_t k = 0; k < t.checkpoint_grid.size(); ++k)
    {
        CHECK(t.checkpoint_grid[k].time
              == doctest::Approx(1000.0 * static_cast<double>(k + 1) / 512).epsilon(1e-15));
        if (k > 0)
        {
            CHECK(t.checkpoint_grid[k].events >= t.checkpoint_grid[k - 1].events);
            CHECK(t.checkpoint_grid[k].downtime >= t.checkpoint_grid[k - 1].downtime);
        }
    }
}

TEST_CASE("Poisson compensator equals rate times horizon")
{
    const auto s = poisson_scenario(2.0, 0.1, 10.0, 0.0, 5000.0, 10);
    for (std::uint64_t rep = 0; rep < 5; ++rep)
    {
        const auto t = simulate(s, rep);
        CHECK(t.lambda_total == doctest::Approx(10000.0).epsilon(1e-12));
        const auto replay = replay_compensator(t, s);
        CHECK(replay.lambda_total == doctest::Approx(10000.0).epsilon(1e-12));
        CHECK(replay.lambda_damage == doctest::Approx(t.lambda_damage).epsilon(1e-10));
    }
}

TEST_CASE("replayed compensator agrees with the simulator on Hawkes paths")
{
    const auto s = test::hawkes_like();
    for (std::uint64_t rep = 0; rep < 10; ++rep)
    {
        const auto t = simulate(s, rep);
        const auto replay = replay_compensator(t, s);
        CHECK(std::abs(replay.lambda_total - t.lambda_total) <= 1e-6 * t.lambda_total);
        CHECK(std::abs(replay.lambda_damage - t.lambda_damage)
              <= 1e-6 * std::max(t.lambda_damage, 1.0));
    }
}

TEST_CASE("replay rejects a mismatched scenario or unsorted log")
{
    const auto s = poisson_scenario(2.0, 0.1, 10.0, 0.0, 100.0, 1);
    auto t = simulate(s, 0);
    auto other = poisson_scenario(3.0, 0.1, 10.0, 0.0, 100.0, 1);
    CHECK_THROWS_AS(replay_compensator(t, other), ContractViolation);
    REQUIRE(t.events.size() >= 2);
    std::swap(t.events[0], t.events[1]);
    CHECK_THROWS_AS(replay_compensator(t.events, t.horizon, t.intensity, t.starts_down),
                    ContractViolation);
}

TEST_CASE("perfect protections never see damage")
{
    const auto s = test::never_failing(IntensityModel::poisson(2.0), 1000.0, 12);
    for (std::uint64_t rep = 0; rep < 10; ++rep)
    {
        const auto t = simulate(s, rep);
        CHECK(t.damage_count == 0);
        CHECK(t.lambda_damage == 0.0);
        CHECK(t.uptime_integral == 1000.0);
        CHECK(std::abs(t.event_count / 1000.0 - 2.0) < 3 * std::sqrt(2.0 / 1000.0) + 0.05);
    }
}

TEST_CASE("always-down protections make every arrival damaging")
{
    Scenario s{IntensityModel::poisson(2.0), ProtectionModel::always_down_model()};
    s.horizon = 1000.0;
    const auto t = simulate(s, 0);
    CHECK(t.damage_count == t.event_count);
    CHECK(t.lambda_damage == t.lambda_total);
    CHECK(t.uptime_integral == 0.0);
}

TEST_CASE("truncating at the first damage event")
{
    const auto s = poisson_scenario(2.0, 0.1, 10.0, 0.0, 5000.0, 13);
    SimulationOptions options;
    options.stop_after_damage = 1;
    const auto t = simulate(s, 0, options);
    CHECK(t.damage_count == 1);
    CHECK(t.horizon < 5000.0);
    CHECK(t.events.back().is_damage);
    CHECK(t.events.back().time == t.horizon);
    CHECK(martingale_residual(t).m_damage == doctest::Approx(1.0 - t.lambda_damage));
}

TEST_CASE("thinned Poisson inter-arrivals pass a KS test")
{
    // Exponential inter-arrivals at rate 2 become unit-exponential after scaling.
    const auto s = test::never_failing(IntensityModel::poisson(2.0), 200.0, 14);
    int passes = 0;
    constexpr int reps = 200;
    for (int rep = 0; rep < reps; ++rep)
    {
        const auto t = simulate(s, static_cast<std::uint64_t>(rep));
        std::vector<double> gaps;
        double previous = 0;
        for (const auto& e : t.events)
        {
            gaps.push_back(2.0 * (e.time - previous));
            previous = e.time;
        }
        passes += ks_test_unit_exponential(gaps).p_value >= 0.01;
    }
    CHECK(passes >= 0.97 * reps);
}

TEST_CASE("two-state protection availability")
{
    // Up rate 0.5, down rate 2: long-run unavailability 0.5 / 2.5 = 0.2.
    const auto s = poisson_scenario(1.0, 0.5, 2.0, 0.0, 2000.0, 15);
    std::vector<double> p;
    for (std::uint64_t rep = 0; rep < 100; ++rep)
    {
        const auto t = simulate(s, rep);
        p.push_back(1.0 - t.uptime_integral / t.horizon);
    }
    const double se = test::sample_sd(p) / std::sqrt(100.0);
    CHECK(std::abs(test::mean(p) - 0.2) < 3 * se);
}

TEST_CASE("Hawkes event rate converges to the stationary value")
{
    auto s = test::never_failing(IntensityModel::hawkes(1.0, 0.8, 2.0), 5000.0, 16);
    std::vector<double> rates;
    for (std::uint64_t rep = 0; rep < 60; ++rep)
        rates.push_back(static_cast<double>(simulate(s, rep).event_count) / 5000.0);
    const double se = test::sample_sd(rates) / std::sqrt(60.0);
    CHECK(std::abs(test::mean(rates) - 5.0 / 3.0) < 3 * se);
}

TEST_CASE("mixture rates are drawn per replication")
{
    auto s = poisson_scenario(1.0, 0.1, 10.0, 0.0, 100.0, 17);
    s.mixture_rates = {0.5, 4.0};
    int low = 0, high = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep)
    {
        const auto t = simulate(s, rep);
        const double rate = t.intensity.as<PoissonIntensity>().rate;
        CHECK((rate == 0.5 || rate == 4.0));
        (rate == 0.5 ? low : high)++;
        CHECK(t.lambda_total == doctest::Approx(rate * 100.0));
        CHECK(simulate(s, rep).intensity == t.intensity);
    }
    CHECK(low > 20);
    CHECK(high > 20);
}

TEST_CASE("caused failures count as damage only when requested")
{
    auto s = poisson_scenario(2.0, 0.05, 2.0, 0.5, 500.0, 18);
    const auto plain = simulate(s, 0);
    CHECK(plain.caused_failure_count > 0);
    CHECK(plain.damage_count == plain.down_arrival_count);
    s.damage_on_caused_failure = true;
    const auto counted = simulate(s, 0);
    CHECK(counted.damage_count == counted.down_arrival_count + counted.caused_failure_count);
    CHECK(counted.lambda_caused_failure > 0);
}
