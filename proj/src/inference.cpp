#include "cdflab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "cdflab/errors.hpp"
#include "cdflab/ks.hpp"

namespace cdflab
{
namespace
{

struct SampleMoments
{
    double mean = 0;
    double sd = 0;
    std::size_t n = 0;
};

// Two-pass mean and sample standard deviation.
SampleMoments moments(std::span<const double> xs)
{
    SampleMoments m;
    m.n = xs.size();
    if (m.n == 0)
        return m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m.n);
    if (m.n < 2)
        return m;
    double ss = 0;
    for (double x : xs)
        ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(m.n - 1));
    return m;
}

Uncertainty t_interval(double center, const SampleMoments& m, double level)
{
    const double se = m.sd / std::sqrt(static_cast<double>(m.n));
    const double half = student_t_quantile(0.5 + 0.5 * level, static_cast<double>(m.n - 1)) * se;
    return {se, {center - half, center + half, level}};
}

void require_level(double level)
{
    if (!(level > 0 && level < 1))
        throw ContractViolation("confidence level must lie in (0, 1)");
}

double damage_compensator(const Trajectory& t)
{
    return t.lambda_damage + (t.damage_on_caused_failure ? t.lambda_caused_failure : 0.0);
}

}  // namespace

double student_t_quantile(double probability, double dof)
{
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, probability);
}

double one_sided_p_value(std::span<const double> values)
{
    if (values.size() < 2)
        throw ContractViolation("one_sided_p_value: need at least two values");
    const SampleMoments m = moments(values);
    if (m.sd == 0)
        return m.mean > 0 ? 0.0 : 1.0;
    const double t = m.mean / (m.sd / std::sqrt(static_cast<double>(m.n)));
    boost::math::students_t dist(static_cast<double>(m.n - 1));
    return boost::math::cdf(boost::math::complement(dist, t));
}

IntervalResult batch_means_ci(const Trajectory& t, BatchStatistic statistic, int batches,
                              double level)
{
    require_level(level);
    IntervalResult result;
    if (batches < 8)
    {
        result.undefined_reason = "batch means need at least 8 batches";
        return result;
    }
    const auto& grid = t.checkpoint_grid;
    if (grid.empty())
    {
        result.undefined_reason = "trajectory has no checkpoint grid";
        return result;
    }
    if (grid.size() % static_cast<std::size_t>(batches) != 0)
        throw ContractViolation("batch_means_ci: checkpoint count not divisible by batches");

    const std::size_t stride = grid.size() / static_cast<std::size_t>(batches);
    auto value_at = [&](std::size_t row) -> std::tuple<double, double> {
        // Row 0 is the implicit origin.
        if (row == 0)
            return {0.0, 0.0};
        const CheckpointRow& r = grid[row - 1];
        switch (statistic)
        {
            case BatchStatistic::cdf:
                return {r.time, static_cast<double>(r.damage_events)};
            case BatchStatistic::lambda:
                return {r.time, static_cast<double>(r.events)};
            case BatchStatistic::p_time:
                return {r.time, r.downtime};
        }
        return {0.0, 0.0};
    };

    std::vector<double> per_batch;
    per_batch.reserve(static_cast<std::size_t>(batches));
    for (int j = 0; j < batches; ++j)
    {
        const auto [t0, v0] = value_at(j * stride);
        const auto [t1, v1] = value_at((j + 1) * stride);
        if (t1 > t0)
            per_batch.push_back((v1 - v0) / (t1 - t0));
    }
    if (per_batch.size() < 2)
    {
        result.undefined_reason = "fewer than 2 nonempty batches";
        return result;
    }
    const SampleMoments m = moments(per_batch);
    const Uncertainty u = t_interval(m.mean, m, level);
    result.interval = u.ci;
    result.mean = m.mean;
    result.standard_error = u.standard_error;
    return result;
}

EstimateReport estimate(const Trajectory& t, double level)
{
    if (!(t.horizon > 0))
        throw ContractViolation("estimate: trajectory horizon must be positive");
    EstimateReport r;
    r.scenario_id = t.scenario_id;
    r.replication_index = t.replication_index;
    r.horizon = t.horizon;
    r.events = t.event_count;
    r.damage_events = t.damage_count;

    const double horizon = t.horizon;
    r.lambda_hat = static_cast<double>(t.event_count) / horizon;
    r.p_time = std::clamp((horizon - t.uptime_integral) / horizon, 0.0, 1.0);
    if (t.event_count > 0)
        r.p_palm = static_cast<double>(t.down_arrival_count) / static_cast<double>(t.event_count);
    else
        r.undefined["p_palm"] = "no initiating events on the horizon";
    r.cdf_hat = static_cast<double>(t.damage_count) / horizon;
    r.rasmussen_hat = r.lambda_hat * r.p_time;
    r.bias_hat = r.cdf_hat - r.rasmussen_hat;

    constexpr int batches = 16;
    const std::pair<const char*, BatchStatistic> batched[] = {
        {"lambda_hat", BatchStatistic::lambda},
        {"p_time", BatchStatistic::p_time},
        {"cdf_hat", BatchStatistic::cdf},
    };
    for (const auto& [field, stat] : batched)
    {
        IntervalResult ci;
        if (!t.checkpoint_grid.empty() && t.checkpoint_grid.size() % batches != 0)
            ci.undefined_reason = "checkpoint count not divisible into 16 batches";
        else
            ci = batch_means_ci(t, stat, batches, level);
        if (ci.interval)
            r.uncertainty[field] = {ci.standard_error, *ci.interval};
        else
            r.undefined[std::string("ci.") + field] = ci.undefined_reason;
    }
    for (const char* field : {"p_palm", "rasmussen_hat", "bias_hat"})
        r.undefined[std::string("ci.") + field] = "no single-trajectory interval for this field";
    return r;
}

EstimateReport pool(std::span<const EstimateReport> reports, double level)
{
    require_level(level);
    if (reports.size() < 2)
        throw ContractViolation("pool: need at least two reports");
    for (const auto& r : reports)
        if (r.scenario_id != reports.front().scenario_id)
            throw ContractViolation("pool: reports come from different scenarios ("
                                    + reports.front().scenario_id + " vs " + r.scenario_id
                                    + ")");

    // Canonical order makes the floating-point sums order independent.
    std::vector<EstimateReport> sorted(reports.begin(), reports.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.replication_index, a.horizon, a.lambda_hat, a.p_time, a.cdf_hat,
                        a.bias_hat)
               < std::tie(b.replication_index, b.horizon, b.lambda_hat, b.p_time, b.cdf_hat,
                          b.bias_hat);
    });

    EstimateReport out;
    out.scenario_id = sorted.front().scenario_id;
    out.replications = static_cast<std::int64_t>(sorted.size());
    for (const auto& r : sorted)
    {
        if (!(r.horizon > 0))
            throw ContractViolation("pool: report with nonpositive horizon");
        out.horizon += r.horizon;
        out.events += r.events;
        out.damage_events += r.damage_events;
    }

    auto pool_field = [&](const char* name, auto getter) -> std::optional<double> {
        std::vector<double> values;
        double weighted = 0;
        double weight = 0;
        for (const auto& r : sorted)
        {
            const std::optional<double> v = getter(r);
            if (!v)
                continue;
            values.push_back(*v);
            weighted += r.horizon * *v;
            weight += r.horizon;
        }
        if (values.empty())
        {
            out.undefined[name] = "undefined in every replication";
            out.undefined[std::string("ci.") + name] = "undefined in every replication";
            return std::nullopt;
        }
        const double center = weighted / weight;
        if (values.size() < 2)
            out.undefined[std::string("ci.") + name] = "fewer than 2 replications define it";
        else
            out.uncertainty[name] = t_interval(center, moments(values), level);
        return center;
    };

    out.lambda_hat = *pool_field("lambda_hat", [](const auto& r) {
        return std::optional<double>(r.lambda_hat);
    });
    out.p_time = *pool_field("p_time", [](const auto& r) { return std::optional<double>(r.p_time); });
    out.p_palm = pool_field("p_palm", [](const auto& r) { return r.p_palm; });
    out.cdf_hat = *pool_field("cdf_hat", [](const auto& r) {
        return std::optional<double>(r.cdf_hat);
    });
    out.rasmussen_hat = *pool_field("rasmussen_hat", [](const auto& r) {
        return std::optional<double>(r.rasmussen_hat);
    });
    out.bias_hat = *pool_field("bias_hat", [](const auto& r) {
        return std::optional<double>(r.bias_hat);
    });

    std::vector<double> biases;
    for (const auto& r : sorted)
        biases.push_back(r.bias_hat);
    out.bias_p_value = one_sided_p_value(biases);
    return out;
}

DiagnosticsReport martingale_residual(const Trajectory& t)
{
    DiagnosticsReport d;
    d.replication_index = t.replication_index;
    d.m_total = static_cast<double>(t.event_count) - t.lambda_total;
    d.damage_compensator = damage_compensator(t);
    d.m_damage = static_cast<double>(t.damage_count) - d.damage_compensator;
    if (d.damage_compensator > 0)
        d.normalized_damage_residual = d.m_damage / std::sqrt(d.damage_compensator);
    else if (t.damage_count > 0)
        throw InvariantViolation("damage events observed with a zero damage compensator");
    return d;
}

DiagnosticsReport time_rescaling_test(const Trajectory& t, double compensator_scale)
{
    if (!(compensator_scale > 0))
        throw ContractViolation("time_rescaling_test: compensator scale must be positive");
    DiagnosticsReport d;
    d.replication_index = t.replication_index;

    std::vector<double> spacings;
    double previous = 0;
    for (const EventRecord& e : t.events)
    {
        if (!e.is_damage)
            continue;
        double tau = e.compensator_damage;
        if (t.damage_on_caused_failure)
            tau += e.compensator_caused_failure;
        tau *= compensator_scale;
        spacings.push_back(tau - previous);
        previous = tau;
    }
    if (static_cast<std::int64_t>(spacings.size()) != t.damage_count)
    {
        d.ks_skipped_reason = "event log not recorded";
        return d;
    }
    if (spacings.size() < 10)
    {
        d.ks_skipped_reason = "fewer than 10 damage events";
        return d;
    }
    const KsResult ks = ks_test_unit_exponential(spacings);
    d.ks_statistic = ks.statistic;
    d.ks_p_value = ks.p_value;
    d.rescaled_count = static_cast<std::int64_t>(ks.n);
    return d;
}

DiagnosticsReport diagnose(const Trajectory& t)
{
    DiagnosticsReport d = martingale_residual(t);
    const DiagnosticsReport ks = time_rescaling_test(t);
    d.ks_statistic = ks.ks_statistic;
    d.ks_p_value = ks.ks_p_value;
    d.rescaled_count = ks.rescaled_count;
    d.ks_skipped_reason = ks.ks_skipped_reason;
    return d;
}

DiagnosticsSummary summarize(std::span<const DiagnosticsReport> reports)
{
    std::vector<DiagnosticsReport> sorted(reports.begin(), reports.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.replication_index < b.replication_index;
    });

    DiagnosticsSummary s;
    s.replications = static_cast<std::int64_t>(sorted.size());
    if (sorted.empty())
        return s;
    std::vector<double> mt, md, nr;
    std::int64_t within = 0;
    for (const auto& r : sorted)
    {
        mt.push_back(r.m_total);
        md.push_back(r.m_damage);
        nr.push_back(r.normalized_damage_residual);
        if (std::abs(r.m_damage) <= 3.0 * std::sqrt(r.damage_compensator))
            ++within;
        if (r.ks_p_value)
        {
            ++s.ks_tested;
            if (*r.ks_p_value < 0.01)
                ++s.ks_rejections;
        }
    }
    const auto a = moments(mt);
    const auto b = moments(md);
    const auto c = moments(nr);
    s.mean_m_total = a.mean;
    s.sd_m_total = a.sd;
    s.mean_m_damage = b.mean;
    s.sd_m_damage = b.sd;
    s.mean_normalized_residual = c.mean;
    s.sd_normalized_residual = c.sd;
    s.strong_law_fraction = static_cast<double>(within) / static_cast<double>(sorted.size());
    if (s.ks_tested > 0)
        s.ks_rejection_rate =
            static_cast<double>(s.ks_rejections) / static_cast<double>(s.ks_tested);
    return s;
}

std::vector<CurvePoint> covariance_bias_curve(std::span<const std::vector<CheckpointRow>> grids)
{
    if (grids.empty())
        throw ContractViolation("covariance_bias_curve: no grids");
    const auto& reference = grids.front();
    for (const auto& g : grids)
    {
        if (g.size() != reference.size())
            throw ContractViolation("covariance_bias_curve: grids have different lengths");
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g[k].time != reference[k].time)
                throw ContractViolation("covariance_bias_curve: checkpoint times misaligned");
    }

    const double reps = static_cast<double>(grids.size());
    std::vector<CurvePoint> curve;
    curve.reserve(reference.size());
    std::vector<double> a(grids.size()), b(grids.size()), c(grids.size());
    for (std::size_t k = 0; k < reference.size(); ++k)
    {
        CurvePoint p;
        p.time = reference[k].time;
        if (!(p.time > 0))
            throw ContractViolation("covariance_bias_curve: checkpoint at t <= 0");
        double residual_sum = 0;
        for (std::size_t i = 0; i < grids.size(); ++i)
        {
            const CheckpointRow& row = grids[i][k];
            a[i] = static_cast<double>(row.damage_events) / p.time;
            b[i] = static_cast<double>(row.events) / p.time;
            c[i] = row.downtime / p.time;
            if (row.compensator_damage > 0)
                residual_sum += (static_cast<double>(row.damage_events) - row.compensator_damage)
                                / std::sqrt(row.compensator_damage);
        }
        p.cdf_hat = std::accumulate(a.begin(), a.end(), 0.0) / reps;
        p.lambda_hat = std::accumulate(b.begin(), b.end(), 0.0) / reps;
        p.p_time = std::accumulate(c.begin(), c.end(), 0.0) / reps;
        p.rasmussen_hat = p.lambda_hat * p.p_time;
        p.bias = p.cdf_hat - p.rasmussen_hat;
        p.norm_residual = residual_sum / reps;
        if (grids.size() >= 2)
        {
            std::vector<double> influence(grids.size());
            for (std::size_t i = 0; i < grids.size(); ++i)
                influence[i] = a[i] - p.p_time * b[i] - p.lambda_hat * c[i];
            p.bias_standard_error = moments(influence).sd / std::sqrt(reps);
        }
        curve.push_back(p);
    }
    return curve;
}

}  // namespace cdflab
