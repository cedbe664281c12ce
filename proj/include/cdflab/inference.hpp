#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdflab/simulator.hpp"

namespace cdflab
{

struct Interval
{
    double low = 0;
    double high = 0;
    double level = 0;
};

struct Uncertainty
{
    double standard_error = 0;
    Interval ci;
};

//---------------------------------------------------------------------------//
/*!
 * Point estimates of the initiating-event rate, unavailability and core
 * damage frequency over one trajectory or a pool of replications.
 *
 *  lambda_hat    = N_T / T
 *  p_time        = (1/T) int (1 - X_s) ds
 *  p_palm        = (1/N_T) sum (1 - X_{T_n-})        (undefined if N_T = 0)
 *  cdf_hat       = N^D_T / T
 *  rasmussen_hat = lambda_hat * p_time
 *  bias_hat      = cdf_hat - rasmussen_hat
 *
 * `uncertainty` and `undefined` are keyed by the field names above; a
 * field's interval is either present in `uncertainty` or explained in
 * `undefined` under "ci.<field>".
 */
struct EstimateReport
{
    std::string scenario_id;
    std::uint64_t replication_index = 0;
    std::int64_t replications = 1;
    double horizon = 0;
    std::int64_t events = 0;
    std::int64_t damage_events = 0;

    double lambda_hat = 0;
    double p_time = 0;
    std::optional<double> p_palm;
    double cdf_hat = 0;
    double rasmussen_hat = 0;
    double bias_hat = 0;
    // One-sided p-value of bias > 0 across replications (pooled only).
    std::optional<double> bias_p_value;

    std::map<std::string, Uncertainty> uncertainty;
    std::map<std::string, std::string> undefined;
};

inline constexpr const char* estimate_fields[] = {"lambda_hat", "p_time", "p_palm",
                                                  "cdf_hat", "rasmussen_hat", "bias_hat"};

enum class BatchStatistic
{
    cdf,
    lambda,
    p_time,
};

struct IntervalResult
{
    std::optional<Interval> interval;
    double mean = 0;
    double standard_error = 0;
    std::string undefined_reason;
};

// Student-t interval over per-batch time averages of one trajectory. Needs
// a checkpoint grid whose size is a multiple of `batches`; fewer than 8
// batches yields the undefined marker.
IntervalResult batch_means_ci(const Trajectory& t, BatchStatistic statistic, int batches,
                              double level);

// Single-trajectory report; intervals for lambda_hat, p_time and cdf_hat
// come from 16-batch batch means when the grid allows.
EstimateReport estimate(const Trajectory& t, double level = 0.95);

// Horizon-weighted pooling with Student-t intervals over replications.
// Output is independent of input order. Throws ContractViolation on fewer
// than two reports or mismatched scenario identities.
EstimateReport pool(std::span<const EstimateReport> reports, double level = 0.95);

// One-sided p-value for mean(values) > 0 (Student t, n - 1 dof).
double one_sided_p_value(std::span<const double> values);

// Student-t quantile with `dof` degrees of freedom.
double student_t_quantile(double probability, double dof);

//---------------------------------------------------------------------------//
// Martingale diagnostics
//---------------------------------------------------------------------------//

struct DiagnosticsReport
{
    std::uint64_t replication_index = 0;
    double m_total = 0;    // N_T - Lambda_T
    double m_damage = 0;   // N^D_T - Lambda^D_T
    double damage_compensator = 0;
    double normalized_damage_residual = 0;  // M^D_T / sqrt(Lambda^D_T)
    std::optional<double> ks_statistic;
    std::optional<double> ks_p_value;
    std::int64_t rescaled_count = 0;
    std::string ks_skipped_reason;
};

// Residual fields only. Throws InvariantViolation when damage events occur
// with a zero damage compensator.
DiagnosticsReport martingale_residual(const Trajectory& t);

// KS fields only: damage times mapped through the damage compensator must
// have unit-exponential spacings. `compensator_scale` multiplies the
// compensator (1 = correctly specified). Fewer than 10 damage events skips.
DiagnosticsReport time_rescaling_test(const Trajectory& t, double compensator_scale = 1.0);

// Both of the above.
DiagnosticsReport diagnose(const Trajectory& t);

struct DiagnosticsSummary
{
    std::int64_t replications = 0;
    double mean_m_total = 0;
    double sd_m_total = 0;
    double mean_m_damage = 0;
    double sd_m_damage = 0;
    double mean_normalized_residual = 0;
    double sd_normalized_residual = 0;
    // Fraction of paths with |M^D_T| <= 3 sqrt(Lambda^D_T).
    double strong_law_fraction = 0;
    std::int64_t ks_tested = 0;
    std::int64_t ks_rejections = 0;  // at level 0.01
    std::optional<double> ks_rejection_rate;
};

DiagnosticsSummary summarize(std::span<const DiagnosticsReport> reports);

//---------------------------------------------------------------------------//
// Finite-t covariance bias curve
//---------------------------------------------------------------------------//

struct CurvePoint
{
    double time = 0;
    double cdf_hat = 0;        // mean N^D_t / t
    double lambda_hat = 0;     // mean N_t / t
    double p_time = 0;         // mean downtime / t
    double rasmussen_hat = 0;  // lambda_hat * p_time
    double bias = 0;           // cdf_hat - rasmussen_hat
    double bias_standard_error = 0;
    double norm_residual = 0;  // mean (N^D_t - Lambda^D_t) / sqrt(Lambda^D_t)
};

// Products of cross-replication means at each checkpoint; the standard
// error is the delta-method linearization. Throws ContractViolation on
// misaligned grids.
std::vector<CurvePoint> covariance_bias_curve(std::span<const std::vector<CheckpointRow>> grids);

}  // namespace cdflab
