#pragma once

#include <string>
#include <variant>

namespace cdflab
{

// Homogeneous Poisson arrivals.
struct PoissonIntensity
{
    double rate;

    friend bool operator==(const PoissonIntensity&, const PoissonIntensity&) = default;
};

// Exponential-kernel self-exciting intensity:
//   lambda(t) = baseline + sum_{t_i < t} jump * exp(-decay * (t - t_i)).
struct HawkesIntensity
{
    double baseline;
    double jump;
    double decay;

    friend bool operator==(const HawkesIntensity&, const HawkesIntensity&) = default;
};

// Rate depends on the left-limit protection flag.
struct StateModulatedIntensity
{
    double rate_up;
    double rate_down;

    friend bool operator==(const StateModulatedIntensity&, const StateModulatedIntensity&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * Conditional intensity of initiating events given the joint history.
 *
 * Immutable once built. The Hawkes factory rejects branching ratios >= 1
 * unless the caller explicitly relaxes stationarity.
 */
class IntensityModel
{
  public:
    using Kind = std::variant<PoissonIntensity, HawkesIntensity, StateModulatedIntensity>;

    enum class Stationarity
    {
        required,
        relaxed,
    };

    static IntensityModel poisson(double rate);
    static IntensityModel hawkes(double baseline, double jump, double decay,
                                 Stationarity stationarity = Stationarity::required);
    static IntensityModel state_modulated(double rate_up, double rate_down);

    const Kind& kind() const noexcept { return kind_; }

    template <class T>
    bool is() const noexcept
    {
        return std::holds_alternative<T>(kind_);
    }
    template <class T>
    const T& as() const
    {
        return std::get<T>(kind_);
    }

    // "poisson", "hawkes" or "state_modulated".
    std::string kind_name() const;

    // jump/decay for Hawkes, 0 otherwise.
    double branching_ratio() const noexcept;

    friend bool operator==(const IntensityModel&, const IntensityModel&) = default;

  private:
    explicit IntensityModel(Kind kind) : kind_(kind) {}
    Kind kind_;
};

//---------------------------------------------------------------------------//
/*!
 * Sufficient statistic for lambda(t | F_{t-}) as of `time`.
 *
 * `excitation` is the Hawkes sum evaluated at `time`; it only decays until
 * the next accepted event. `protection_flag` is the left-limit protection
 * indicator (1 = functional).
 */
struct IntensityState
{
    double excitation = 0.0;
    int protection_flag = 1;
    double time = 0.0;
};

// lambda at state.time + elapsed, assuming no events in between.
double evaluate(const IntensityModel& m, const IntensityState& s, double elapsed);

// Rate that dominates evaluate() from s.time until the next state change.
double upper_bound(const IntensityModel& m, const IntensityState& s);

// Exact integral of lambda over [a, b]; s must be current as of some time
// <= a and no event or protection change may fall inside (s.time, b).
double integrate_segment(const IntensityModel& m, const IntensityState& s, double a, double b);

// Decay the state forward to `now` without adding an event.
IntensityState advance(const IntensityModel& m, const IntensityState& s, double now);

// State just after an accepted initiating event at `now`.
IntensityState excite(const IntensityModel& m, const IntensityState& s, double now);

}  // namespace cdflab
