#include "cdflab/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdflab/errors.hpp"

namespace cdflab
{
namespace
{
void require_rate(double value, const char* field)
{
    if (!std::isfinite(value) || value <= 0)
        throw ValidationError(field, "rate must be positive and finite");
}

double decay_factor(double decay, double elapsed)
{
    return std::exp(-decay * elapsed);
}

template <class... Fs>
struct Overload : Fs...
{
    using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;
}  // namespace

IntensityModel IntensityModel::poisson(double rate)
{
    require_rate(rate, "intensity.lambda");
    return IntensityModel(PoissonIntensity{rate});
}

IntensityModel IntensityModel::hawkes(double baseline, double jump, double decay,
                                      Stationarity stationarity)
{
    require_rate(baseline, "intensity.mu");
    require_rate(jump, "intensity.alpha");
    require_rate(decay, "intensity.beta");
    if (stationarity == Stationarity::required && jump / decay >= 1.0)
    {
        std::ostringstream msg;
        msg << "non-stationary Hawkes: alpha/beta = " << jump / decay << " must be < 1";
        throw ValidationError("intensity.alpha", msg.str());
    }
    return IntensityModel(HawkesIntensity{baseline, jump, decay});
}

IntensityModel IntensityModel::state_modulated(double rate_up, double rate_down)
{
    require_rate(rate_up, "intensity.lambda_up");
    require_rate(rate_down, "intensity.lambda_down");
    return IntensityModel(StateModulatedIntensity{rate_up, rate_down});
}

std::string IntensityModel::kind_name() const
{
    return std::visit(Overload{
                          [](const PoissonIntensity&) { return "poisson"; },
                          [](const HawkesIntensity&) { return "hawkes"; },
                          [](const StateModulatedIntensity&) { return "state_modulated"; },
                      },
                      kind_);
}

double IntensityModel::branching_ratio() const noexcept
{
    if (const auto* h = std::get_if<HawkesIntensity>(&kind_))
        return h->jump / h->decay;
    return 0.0;
}

double evaluate(const IntensityModel& m, const IntensityState& s, double elapsed)
{
    return std::visit(
        Overload{
            [](const PoissonIntensity& p) { return p.rate; },
            [&](const HawkesIntensity& h) {
                return h.baseline + s.excitation * decay_factor(h.decay, elapsed);
            },
            [&](const StateModulatedIntensity& sm) {
                return s.protection_flag == 1 ? sm.rate_up : sm.rate_down;
            },
        },
        m.kind());
}

double upper_bound(const IntensityModel& m, const IntensityState& s)
{
    // Between state changes every kind is either constant or decaying, so
    // the value at s.time dominates.
    return evaluate(m, s, 0.0);
}

double integrate_segment(const IntensityModel& m, const IntensityState& s, double a, double b)
{
    if (a > b)
        throw ContractViolation("integrate_segment: a > b");
    if (a < s.time)
        throw ContractViolation("integrate_segment: segment starts before the state time");
    const double width = b - a;
    return std::visit(
        Overload{
            [&](const PoissonIntensity& p) { return p.rate * width; },
            [&](const HawkesIntensity& h) {
                const double at_a = s.excitation * decay_factor(h.decay, a - s.time);
                return h.baseline * width - at_a / h.decay * std::expm1(-h.decay * width);
            },
            [&](const StateModulatedIntensity& sm) {
                return (s.protection_flag == 1 ? sm.rate_up : sm.rate_down) * width;
            },
        },
        m.kind());
}

IntensityState advance(const IntensityModel& m, const IntensityState& s, double now)
{
    if (now < s.time)
        throw ContractViolation("advance: time moves backwards");
    IntensityState next = s;
    if (const auto* h = std::get_if<HawkesIntensity>(&m.kind()))
        next.excitation = s.excitation * decay_factor(h->decay, now - s.time);
    next.time = now;
    return next;
}

IntensityState excite(const IntensityModel& m, const IntensityState& s, double now)
{
    IntensityState next = advance(m, s, now);
    if (const auto* h = std::get_if<HawkesIntensity>(&m.kind()))
        next.excitation += h->jump;
    return next;
}

}  // namespace cdflab
