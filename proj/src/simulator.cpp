#include "cdflab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cdflab/errors.hpp"
#include "cdflab/kernels/kernels.hpp"
#include "cdflab/quadrature.hpp"

namespace cdflab
{
namespace
{

std::string describe(const Distribution& d)
{
    std::ostringstream out;
    out.precision(17);
    out << d.kind_name() << '(';
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>)
                out << law.rate;
            else if constexpr (std::is_same_v<T, Weibull>)
                out << law.shape << ',' << law.scale;
            else
                out << law.value;
        },
        d.law());
    out << ')';
    return out.str();
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

IntensityModel path_intensity(const Scenario& s, RngStream& rng)
{
    if (s.mixture_rates.empty())
        return s.intensity;
    const auto pick = rng.next() % s.mixture_rates.size();
    return IntensityModel::poisson(s.mixture_rates[pick]);
}

// Integration state for one path: accumulates compensators and the
// downtime integral while walking forward over piecewise-smooth segments.
class PathIntegrator
{
  public:
    PathIntegrator(const IntensityModel& model, const Scenario& scenario, Trajectory& out,
                   int checkpoints)
        : model_(model), scenario_(scenario), out_(out), checkpoints_(checkpoints)
    {
    }

    IntensityState state;
    double now = 0.0;

    // Integrate up to `target`, emitting checkpoints that fall strictly
    // before it, and bring `state` forward.
    void advance_to(double target)
    {
        while (next_checkpoint_ <= checkpoints_ && checkpoint_time(next_checkpoint_) < target)
        {
            const double c = checkpoint_time(next_checkpoint_);
            accumulate(c);
            emit(c);
            ++next_checkpoint_;
        }
        accumulate(target);
        state = advance(model_, state, target);
    }

    // Emit every checkpoint at or before the current clock.
    void flush_checkpoints()
    {
        while (next_checkpoint_ <= checkpoints_ && checkpoint_time(next_checkpoint_) <= now)
        {
            emit(checkpoint_time(next_checkpoint_));
            ++next_checkpoint_;
        }
    }

  private:
    double checkpoint_time(int k) const
    {
        return k == checkpoints_ ? scenario_.horizon
                                 : scenario_.horizon * static_cast<double>(k) / checkpoints_;
    }

    void accumulate(double target)
    {
        const double area = integrate_segment(model_, state, now, target);
        out_.lambda_total += area;
        if (state.protection_flag == 0)
        {
            out_.lambda_damage += area;
            downtime_ += target - now;
        }
        else
        {
            out_.uptime_integral += target - now;
            out_.lambda_caused_failure += scenario_.protection.coupling_q() * area;
        }
        now = target;
    }

    void emit(double time)
    {
        out_.checkpoint_grid.push_back({time, out_.event_count, out_.damage_count,
                                        out_.lambda_total, out_.lambda_damage,
                                        downtime_});
    }

    const IntensityModel& model_;
    const Scenario& scenario_;
    Trajectory& out_;
    int checkpoints_;
    int next_checkpoint_ = 1;
    double downtime_ = 0.0;
};

}  // namespace

void validate(const Scenario& s)
{
    if (!std::isfinite(s.horizon) || s.horizon <= 0)
        throw ValidationError("horizon", "must be positive and finite");
    if (!s.mixture_rates.empty())
    {
        if (!s.intensity.is<PoissonIntensity>())
            throw ValidationError("intensity.mixture_rates",
                                  "rate mixtures apply to the poisson kind only");
        for (double r : s.mixture_rates)
            if (!std::isfinite(r) || r <= 0)
                throw ValidationError("intensity.mixture_rates", "rates must be positive");
    }
}

std::string scenario_identity(const Scenario& s)
{
    std::ostringstream canon;
    canon.precision(17);
    canon << s.intensity.kind_name() << '[';
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PoissonIntensity>)
                canon << k.rate;
            else if constexpr (std::is_same_v<T, HawkesIntensity>)
                canon << k.baseline << ',' << k.jump << ',' << k.decay;
            else
                canon << k.rate_up << ',' << k.rate_down;
        },
        s.intensity.kind());
    canon << "] mix[";
    for (double r : s.mixture_rates)
        canon << r << ',';
    canon << "] up=" << describe(s.protection.up_duration())
          << " down=" << describe(s.protection.down_duration())
          << " q=" << s.protection.coupling_q() << " always_down=" << s.protection.always_down()
          << " T=" << s.horizon << " dcf=" << s.damage_on_caused_failure;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canon.str())));
    return buf;
}

std::string_view event_kind_tag(EventKind kind) noexcept
{
    switch (kind)
    {
        case EventKind::initiating_event:
            return "IE";
        case EventKind::protection_down:
            return "PDOWN";
        case EventKind::protection_up:
            return "PUP";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view tag) noexcept
{
    if (tag == "IE")
        return EventKind::initiating_event;
    if (tag == "PDOWN")
        return EventKind::protection_down;
    if (tag == "PUP")
        return EventKind::protection_up;
    return std::nullopt;
}

StepKind next_step(double candidate, double next_switch, double horizon) noexcept
{
    if (std::min(candidate, next_switch) >= horizon)
        return StepKind::horizon;
    // Ties go to the endogenous transition so the arrival sees the
    // post-switch left limit.
    if (next_switch <= candidate)
        return StepKind::transition;
    return StepKind::candidate;
}

Trajectory simulate(const Scenario& s, std::uint64_t replication_index,
                    const SimulationOptions& options)
{
    validate(s);
    if (options.checkpoints < 0)
        throw ContractViolation("simulate: negative checkpoint count");

    RngStream rng = derive_stream(s.base_seed, replication_index);
    Trajectory out;
    out.horizon = s.horizon;
    out.replication_index = replication_index;
    out.scenario_id = scenario_identity(s);
    out.damage_on_caused_failure = s.damage_on_caused_failure;
    out.intensity = path_intensity(s, rng);
    const IntensityModel& model = out.intensity;

    ProtectionState protection = initial_protection_state(s.protection, rng);
    out.starts_down = protection.flag == 0;

    PathIntegrator path(model, s, out, options.checkpoints);
    path.state = IntensityState{0.0, protection.flag, 0.0};
    if (options.checkpoints > 0)
        out.checkpoint_grid.reserve(static_cast<std::size_t>(options.checkpoints));

    auto record = [&](EventRecord e) {
        if (!options.record_events)
            return;
        e.compensator_total = out.lambda_total;
        e.compensator_damage = out.lambda_damage;
        e.compensator_caused_failure = out.lambda_caused_failure;
        out.events.push_back(e);
    };

    for (;;)
    {
        const double bound = upper_bound(model, path.state);
        const double candidate = path.now + sample_exponential(bound, rng);
        const double next_switch = protection.next_transition;

        const StepKind step = next_step(candidate, next_switch, s.horizon);
        if (step == StepKind::horizon)
        {
            path.advance_to(s.horizon);
            break;
        }

        if (step == StepKind::transition)
        {
            path.advance_to(next_switch);
            protection = flip(s.protection, protection, rng);
            path.state.protection_flag = protection.flag;
            record({next_switch,
                    protection.flag == 0 ? EventKind::protection_down : EventKind::protection_up,
                    protection.flag, false, false});
            continue;
        }

        path.advance_to(candidate);
        const double rate = evaluate(model, path.state, 0.0);
        if (rate < bound && rng.uniform_open() * bound > rate)
            continue;  // thinned

        const int left_limit = protection.flag;
        const CouplingOutcome coupling =
            apply_arrival_coupling(s.protection, protection, candidate, rng);
        const bool is_damage =
            left_limit == 0 || (coupling.caused_failure && s.damage_on_caused_failure);

        ++out.event_count;
        if (left_limit == 0)
            ++out.down_arrival_count;
        if (is_damage)
            ++out.damage_count;
        if (coupling.caused_failure)
            ++out.caused_failure_count;
        record({candidate, EventKind::initiating_event, left_limit, is_damage,
                coupling.caused_failure});

        protection = coupling.state;
        path.state.protection_flag = protection.flag;
        path.state = excite(model, path.state, candidate);

        if (options.stop_after_damage && is_damage
            && out.damage_count >= *options.stop_after_damage)
        {
            out.horizon = candidate;
            out.checkpoint_grid.clear();
            return out;
        }
    }
    path.flush_checkpoints();
    return out;
}

CompensatorPair replay_compensator(std::span<const EventRecord> events, double horizon,
                                   const IntensityModel& intensity, bool starts_down)
{
    for (std::size_t i = 1; i < events.size(); ++i)
        if (!(events[i - 1].time <= events[i].time))
            throw ContractViolation("replay_compensator: event log not time-ordered");
    if (!events.empty() && (events.front().time < 0 || events.back().time > horizon))
        throw ContractViolation("replay_compensator: event outside [0, horizon]");

    IntensityState state{0.0, starts_down ? 0 : 1, 0.0};
    CompensatorPair result;
    double now = 0.0;

    auto integrate_to = [&](double target) {
        double area = 0.0;
        if (const auto* h = std::get_if<HawkesIntensity>(&intensity.kind()))
        {
            const double origin = now;
            const double excitation = state.excitation;
            auto integrand = [&](std::span<const double> x, std::span<double> y) {
                std::array<double, 15> elapsed;
                for (std::size_t i = 0; i < x.size(); ++i)
                    elapsed[i] = x[i] - origin;
                kernels::decay_intensity(h->baseline, excitation, h->decay,
                                         std::span<const double>(elapsed.data(), x.size()), y);
            };
            area = integrate_adaptive(integrand, now, target, 1e-11).value;
        }
        else
        {
            auto integrand = [&](std::span<const double> x, std::span<double> y) {
                for (std::size_t i = 0; i < x.size(); ++i)
                    y[i] = evaluate(intensity, state, x[i] - now);
            };
            area = integrate_adaptive(integrand, now, target, 1e-11).value;
        }
        result.lambda_total += area;
        if (state.protection_flag == 0)
            result.lambda_damage += area;
        state = advance(intensity, state, target);
        now = target;
    };

    for (const EventRecord& e : events)
    {
        integrate_to(e.time);
        switch (e.kind)
        {
            case EventKind::initiating_event:
                if (e.caused_failure)
                    state.protection_flag = 0;
                state = excite(intensity, state, e.time);
                break;
            case EventKind::protection_down:
                state.protection_flag = 0;
                break;
            case EventKind::protection_up:
                state.protection_flag = 1;
                break;
        }
    }
    integrate_to(horizon);
    return result;
}

CompensatorPair replay_compensator(const Trajectory& t, const Scenario& s)
{
    if (t.scenario_id != scenario_identity(s))
        throw ContractViolation("replay_compensator: trajectory was produced by another scenario");
    return replay_compensator(t.events, t.horizon, t.intensity, t.starts_down);
}

}  // namespace cdflab
