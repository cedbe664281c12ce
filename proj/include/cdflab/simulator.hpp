#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdflab/intensity.hpp"
#include "cdflab/protection.hpp"

namespace cdflab
{

//---------------------------------------------------------------------------//
/*!
 * Full generative description of one experiment.
 *
 * `mixture_rates`, when nonempty, replaces a Poisson rate by one drawn
 * uniformly from the list at the start of each replication (a random but
 * per-path constant lambda).
 */
struct Scenario
{
    IntensityModel intensity;
    ProtectionModel protection;
    double horizon = 0;
    bool damage_on_caused_failure = false;
    std::uint64_t base_seed = 0;
    std::vector<double> mixture_rates;
};

// Throws ValidationError naming the offending field.
void validate(const Scenario& s);

// Stable hex digest of everything but the seed; reports from the same
// scenario share it.
std::string scenario_identity(const Scenario& s);

enum class EventKind
{
    initiating_event,
    protection_down,
    protection_up,
};

// CSV tags: IE, PDOWN, PUP.
std::string_view event_kind_tag(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view tag) noexcept;

struct EventRecord
{
    double time = 0;
    EventKind kind = EventKind::initiating_event;
    int left_limit_flag = 1;  // meaningful for initiating events only
    bool is_damage = false;
    bool caused_failure = false;
    // Compensators Lambda_t and Lambda^D_t at the event time.
    double compensator_total = 0;
    double compensator_damage = 0;
    double compensator_caused_failure = 0;
};

// One row of the checkpoint grid. All counts are right-continuous values
// at `time`.
struct CheckpointRow
{
    double time = 0;
    std::int64_t events = 0;
    std::int64_t damage_events = 0;
    double compensator_total = 0;
    double compensator_damage = 0;
    double downtime = 0;  // integral of (1 - X_s) over [0, time]
};

struct Trajectory
{
    std::vector<EventRecord> events;
    double horizon = 0;
    double lambda_total = 0;    // Lambda_T
    double lambda_damage = 0;   // Lambda^D_T
    // q * integral of X_s lambda_s: compensator of coupling-induced failures.
    double lambda_caused_failure = 0;
    double uptime_integral = 0;
    std::vector<CheckpointRow> checkpoint_grid;

    std::int64_t event_count = 0;
    std::int64_t damage_count = 0;
    std::int64_t caused_failure_count = 0;
    // Arrivals that found protections down (equals damage_count unless
    // damage_on_caused_failure is set).
    std::int64_t down_arrival_count = 0;

    std::uint64_t replication_index = 0;
    std::string scenario_id;
    bool damage_on_caused_failure = false;
    // Intensity actually driving this path (differs from the scenario's
    // only for rate mixtures).
    IntensityModel intensity = IntensityModel::poisson(1.0);
    bool starts_down = false;
};

struct SimulationOptions
{
    int checkpoints = 512;
    bool record_events = true;
    // Stop right after this many damage events; the horizon becomes the
    // time of the last one and the checkpoint grid is dropped.
    std::optional<std::int64_t> stop_after_damage;
};

// Ogata thinning with closed-form compensator accumulation. Pure given
// (scenario, replication_index).
enum class StepKind
{
    horizon,
    transition,
    candidate,
};

// Which event the thinning loop processes next.
StepKind next_step(double candidate, double next_switch, double horizon) noexcept;

Trajectory simulate(const Scenario& s, std::uint64_t replication_index,
                    const SimulationOptions& options = {});

struct CompensatorPair
{
    double lambda_total = 0;
    double lambda_damage = 0;
};

// Recompute both compensators from an event log by adaptive quadrature of
// the intensity. Throws ContractViolation on an unsorted log.
CompensatorPair replay_compensator(std::span<const EventRecord> events, double horizon,
                                   const IntensityModel& intensity, bool starts_down);
CompensatorPair replay_compensator(const Trajectory& t, const Scenario& s);

}  // namespace cdflab
