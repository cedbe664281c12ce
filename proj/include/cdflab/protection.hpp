#pragma once

#include <limits>

#include "cdflab/distribution.hpp"
#include "cdflab/rng.hpp"

namespace cdflab
{

//---------------------------------------------------------------------------//
/*!
 * Alternating up/down renewal model of the protection state, plus the
 * arrival-induced failure channel.
 *
 * An initiating event that finds protections up destroys them with
 * probability `coupling_q`. An arrival never repairs failed protections.
 * `always_down` models protections that never function; the up/down laws
 * are then ignored.
 */
class ProtectionModel
{
  public:
    ProtectionModel(Distribution up_duration, Distribution down_duration, double coupling_q);

    static ProtectionModel always_down_model();

    const Distribution& up_duration() const noexcept { return up_; }
    const Distribution& down_duration() const noexcept { return down_; }
    double coupling_q() const noexcept { return coupling_q_; }
    bool always_down() const noexcept { return always_down_; }

    friend bool operator==(const ProtectionModel&, const ProtectionModel&) = default;

  private:
    Distribution up_;
    Distribution down_;
    double coupling_q_;
    bool always_down_ = false;
};

struct ProtectionState
{
    int flag = 1;  // left-limit value, 1 = functional
    double next_transition = std::numeric_limits<double>::infinity();
};

// State at t = 0: functional, first failure scheduled.
ProtectionState initial_protection_state(const ProtectionModel& p, RngStream& rng);

// Draw the next endogenous switch from the law matching s.flag.
ProtectionState schedule_transition(const ProtectionModel& p, ProtectionState s, double now,
                                    RngStream& rng);

// Apply the scheduled switch at s.next_transition and draw the next one.
ProtectionState flip(const ProtectionModel& p, ProtectionState s, RngStream& rng);

struct CouplingOutcome
{
    ProtectionState state;
    bool caused_failure = false;
};

// Effect of an initiating event at `now` on protections. Consumes one
// uniform draw whenever protections are up, regardless of q.
CouplingOutcome apply_arrival_coupling(const ProtectionModel& p, ProtectionState s, double now,
                                       RngStream& rng);

}  // namespace cdflab
