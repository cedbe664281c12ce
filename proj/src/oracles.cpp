#include "cdflab/oracles.hpp"

#include <cmath>
#include <numeric>

#include "cdflab/errors.hpp"
#include "cdflab/parallel.hpp"

namespace cdflab
{

MarkovCdf markov_cdf(const MarkovScenarioParams& p)
{
    auto positive = [](double x) { return std::isfinite(x) && x > 0; };
    if (!positive(p.failure_rate))
        throw ValidationError("mu_f", "must be positive");
    if (!positive(p.repair_rate))
        throw ValidationError("mu_r", "must be positive");
    if (!(p.coupling_q >= 0 && p.coupling_q <= 1))
        throw ValidationError("q", "must lie in [0, 1]");

    double lambda_up = 0;
    double lambda_down = 0;
    if (const auto* c = std::get_if<MarkovScenarioParams::Constant>(&p.arrival))
    {
        if (!positive(c->lambda))
            throw ValidationError("lambda", "must be positive");
        lambda_up = lambda_down = c->lambda;
    }
    else
    {
        const auto& m = std::get<MarkovScenarioParams::Modulated>(p.arrival);
        if (!positive(m.lambda_up))
            throw ValidationError("lambda_up", "must be positive");
        if (!positive(m.lambda_down))
            throw ValidationError("lambda_down", "must be positive");
        lambda_up = m.lambda_up;
        lambda_down = m.lambda_down;
    }

    const double down_rate = p.failure_rate + lambda_up * p.coupling_q;
    MarkovCdf out;
    out.unavailability = down_rate / (down_rate + p.repair_rate);
    const double availability = 1.0 - out.unavailability;
    out.true_cdf = lambda_down * out.unavailability;
    const double mean_rate = lambda_up * availability + lambda_down * out.unavailability;
    out.rasmussen_cdf = mean_rate * out.unavailability;
    return out;
}

MarkovScenarioParams markov_params(const Scenario& s)
{
    const ProtectionModel& prot = s.protection;
    if (prot.always_down())
        throw UnsupportedScenario("markov oracle: always-down protections have no chain");
    if (!prot.up_duration().is_exponential() || !prot.down_duration().is_exponential())
        throw UnsupportedScenario("markov oracle: up/down laws must be exponential");
    if (!s.mixture_rates.empty())
        throw UnsupportedScenario("markov oracle: rate mixtures are not ergodic");

    MarkovScenarioParams p{MarkovScenarioParams::Constant{1.0},
                           std::get<Exponential>(prot.up_duration().law()).rate,
                           std::get<Exponential>(prot.down_duration().law()).rate,
                           prot.coupling_q()};
    if (s.intensity.is<PoissonIntensity>())
        p.arrival = MarkovScenarioParams::Constant{s.intensity.as<PoissonIntensity>().rate};
    else if (s.intensity.is<StateModulatedIntensity>())
    {
        const auto& sm = s.intensity.as<StateModulatedIntensity>();
        p.arrival = MarkovScenarioParams::Modulated{sm.rate_up, sm.rate_down};
    }
    else
        throw UnsupportedScenario("markov oracle: Hawkes intensities have no two-state chain");
    if (s.damage_on_caused_failure)
        throw UnsupportedScenario("markov oracle: assumes left-limit damage counting");
    return p;
}

double hawkes_stationary_rate(double mu, double alpha, double beta)
{
    if (!(beta > 0))
        throw ValidationError("beta", "must be positive");
    if (!(alpha >= 0))
        throw ValidationError("alpha", "must be nonnegative");
    const double ratio = alpha / beta;
    if (ratio >= 1.0)
        throw ValidationError("alpha", "non-stationary Hawkes: alpha/beta >= 1");
    return mu / (1.0 - ratio);
}

BruteForceCdf brute_force_cdf(const Scenario& s, int replications, std::uint64_t pilot_seed,
                              int threads)
{
    if (replications < 100)
        throw ContractViolation("brute_force_cdf: need at least 100 replications");
    Scenario pilot = s;
    pilot.base_seed = pilot_seed;
    validate(pilot);

    SimulationOptions options;
    options.checkpoints = 0;
    options.record_events = false;
    std::vector<double> rates(static_cast<std::size_t>(replications));
    parallel_for(rates.size(), threads, [&](std::size_t i) {
        const Trajectory t = simulate(pilot, i, options);
        rates[i] = static_cast<double>(t.damage_count) / t.horizon;
    });

    const double n = static_cast<double>(replications);
    const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
    double ss = 0;
    for (double r : rates)
        ss += (r - mean) * (r - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace cdflab
