#include "cdflab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdflab/errors.hpp"
#include "cdflab/parallel.hpp"

namespace cdflab
{
namespace
{
double relative_gap(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}
}  // namespace

ExperimentResult run_experiment(const Scenario& s, const ExperimentOptions& options)
{
    validate(s);
    if (options.replications < 1)
        throw ContractViolation("run_experiment: replications must be >= 1");

    ExperimentResult result;
    result.replications.resize(static_cast<std::size_t>(options.replications));

    SimulationOptions sim;
    sim.checkpoints = options.checkpoints;
    sim.record_events = true;

    parallel_for(result.replications.size(), options.threads, [&](std::size_t i) {
        Trajectory t = simulate(s, i, sim);
        ReplicationOutcome& out = result.replications[i];
        out.estimate = estimate(t, options.level);
        out.diagnostics = diagnose(t);
        out.lambda_total = t.lambda_total;
        out.lambda_damage = t.lambda_damage;
        if (options.verify_compensator)
        {
            const CompensatorPair replay = replay_compensator(t, s);
            out.compensator_relative_error =
                std::max(relative_gap(t.lambda_total, replay.lambda_total),
                         relative_gap(t.lambda_damage, replay.lambda_damage));
        }
        if (options.on_trajectory)
            options.on_trajectory(t);
        out.grid = std::move(t.checkpoint_grid);
    });

    std::vector<EstimateReport> estimates;
    std::vector<DiagnosticsReport> diagnostics;
    std::vector<std::vector<CheckpointRow>> grids;
    for (const auto& r : result.replications)
    {
        estimates.push_back(r.estimate);
        diagnostics.push_back(r.diagnostics);
        if (!r.grid.empty())
            grids.push_back(r.grid);
        result.max_compensator_relative_error =
            std::max(result.max_compensator_relative_error, r.compensator_relative_error);
        if (r.compensator_relative_error > compensator_tolerance)
            ++result.compensator_failures;
    }
    result.pooled = estimates.size() >= 2 ? pool(estimates, options.level) : estimates.front();
    result.diagnostics = summarize(diagnostics);
    if (!grids.empty())
        result.curve = covariance_bias_curve(grids);
    return result;
}

void check_report_invariants(const EstimateReport& r, bool default_damage_mode)
{
    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << "replication " << r.replication_index << ": " << what;
        throw InvariantViolation(msg.str());
    };
    if (!(r.p_time >= 0 && r.p_time <= 1))
        fail("p_time outside [0, 1]");
    if (r.p_palm && !(*r.p_palm >= 0 && *r.p_palm <= 1))
        fail("p_palm outside [0, 1]");
    if (r.cdf_hat > r.lambda_hat)
        fail("cdf_hat exceeds lambda_hat");
    if (default_damage_mode && r.replications == 1)
    {
        const double factored = r.p_palm ? r.lambda_hat * *r.p_palm : 0.0;
        if (std::abs(r.cdf_hat - factored) > 1e-12 * std::max(std::abs(r.cdf_hat), 1e-300))
            fail("cdf_hat != lambda_hat * p_palm");
    }
}

void check_invariants(const ExperimentResult& r, bool default_damage_mode)
{
    for (const auto& rep : r.replications)
        check_report_invariants(rep.estimate, default_damage_mode);
    if (r.compensator_failures > 0)
    {
        std::ostringstream msg;
        msg << r.compensator_failures
            << " trajectories failed the compensator replay check (max relative error "
            << r.max_compensator_relative_error << ")";
        throw InvariantViolation(msg.str());
    }
}

}  // namespace cdflab
