#include "cdflab/protection.hpp"

#include <cmath>
#include <variant>

#include "cdflab/errors.hpp"

namespace cdflab
{
namespace
{
void require_nondegenerate(const Distribution& d, const char* field)
{
    // A zero-length period would make the renewal clock loop forever.
    if (const auto* det = std::get_if<Deterministic>(&d.law()); det && det->value <= 0)
        throw ValidationError(field,
                              "deterministic duration must be > 0 (use always_down for "
                              "protections that never function)");
}
}  // namespace

ProtectionModel::ProtectionModel(Distribution up_duration, Distribution down_duration,
                                 double coupling_q)
    : up_(up_duration), down_(down_duration), coupling_q_(coupling_q)
{
    if (!(coupling_q >= 0.0 && coupling_q <= 1.0))
        throw ValidationError("protection.coupling_q", "must lie in [0, 1]");
    require_nondegenerate(up_, "protection.up");
    require_nondegenerate(down_, "protection.down");
}

ProtectionModel ProtectionModel::always_down_model()
{
    ProtectionModel model(Distribution::deterministic(1.0), Distribution::deterministic(1.0),
                          0.0);
    model.always_down_ = true;
    return model;
}

ProtectionState initial_protection_state(const ProtectionModel& p, RngStream& rng)
{
    if (p.always_down())
        return {0, std::numeric_limits<double>::infinity()};
    return schedule_transition(p, ProtectionState{1, 0.0}, 0.0, rng);
}

ProtectionState schedule_transition(const ProtectionModel& p, ProtectionState s, double now,
                                    RngStream& rng)
{
    if (p.always_down())
    {
        s.next_transition = std::numeric_limits<double>::infinity();
        return s;
    }
    const Distribution& law = s.flag == 1 ? p.up_duration() : p.down_duration();
    s.next_transition = now + sample_duration(law, rng);
    if (!(s.next_transition > now))
        throw InvariantViolation("protection transition not strictly in the future");
    return s;
}

ProtectionState flip(const ProtectionModel& p, ProtectionState s, RngStream& rng)
{
    const double now = s.next_transition;
    s.flag = 1 - s.flag;
    return schedule_transition(p, s, now, rng);
}

CouplingOutcome apply_arrival_coupling(const ProtectionModel& p, ProtectionState s, double now,
                                       RngStream& rng)
{
    if (s.flag == 0 || p.always_down())
        return {s, false};
    const double u = rng.uniform_open();
    if (u >= p.coupling_q())
        return {s, false};
    // The running up-period is discarded; a fresh repair time is drawn.
    s.flag = 0;
    return {schedule_transition(p, s, now, rng), true};
}

}  // namespace cdflab
