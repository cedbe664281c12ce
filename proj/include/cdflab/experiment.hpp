#pragma once

#include <functional>
#include <vector>

#include "cdflab/inference.hpp"
#include "cdflab/simulator.hpp"

namespace cdflab
{

// Relative tolerance between closed-form and quadrature compensators.
inline constexpr double compensator_tolerance = 1e-6;

struct ExperimentOptions
{
    int replications = 200;
    int checkpoints = 512;
    int threads = 0;  // 0 = hardware concurrency
    double level = 0.95;
    bool verify_compensator = true;
    // Invoked on the worker thread that produced the path; must only touch
    // state keyed by t.replication_index.
    std::function<void(const Trajectory&)> on_trajectory;
};

struct ReplicationOutcome
{
    EstimateReport estimate;
    DiagnosticsReport diagnostics;
    std::vector<CheckpointRow> grid;
    double lambda_total = 0;
    double lambda_damage = 0;
    // max relative gap of (Lambda_T, Lambda^D_T) against replay quadrature
    double compensator_relative_error = 0;
};

struct ExperimentResult
{
    std::vector<ReplicationOutcome> replications;  // indexed by replication
    EstimateReport pooled;
    DiagnosticsSummary diagnostics;
    std::vector<CurvePoint> curve;
    double max_compensator_relative_error = 0;
    std::int64_t compensator_failures = 0;
};

ExperimentResult run_experiment(const Scenario& s, const ExperimentOptions& options);

// Throws InvariantViolation naming the first broken estimator or
// compensator invariant.
void check_invariants(const ExperimentResult& r, bool default_damage_mode);

// Factorization and bounds on a single report.
void check_report_invariants(const EstimateReport& r, bool default_damage_mode);

}  // namespace cdflab
