#pragma once

#include <string>
#include <variant>

#include "cdflab/rng.hpp"

namespace cdflab
{

struct Exponential
{
    double rate;  // per time unit

    friend bool operator==(const Exponential&, const Exponential&) = default;
};

struct Weibull
{
    double shape;
    double scale;  // time units

    friend bool operator==(const Weibull&, const Weibull&) = default;
};

struct Deterministic
{
    double value;  // time units

    friend bool operator==(const Deterministic&, const Deterministic&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * Duration law for protection up/down periods.
 *
 * Parameters are validated by the factory functions; a constructed
 * Distribution can always be sampled.
 */
class Distribution
{
  public:
    using Law = std::variant<Exponential, Weibull, Deterministic>;

    static Distribution exponential(double rate);
    static Distribution weibull(double shape, double scale);
    static Distribution deterministic(double value);

    const Law& law() const noexcept { return law_; }
    bool is_exponential() const noexcept
    {
        return std::holds_alternative<Exponential>(law_);
    }
    double mean() const noexcept;

    // Short tag used in configs and reports: exponential, weibull, deterministic.
    std::string kind_name() const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

  private:
    explicit Distribution(Law law) : law_(law) {}
    Law law_;
};

// Finite, nonnegative duration; advances the stream by at most one draw.
double sample_duration(const Distribution& d, RngStream& rng);

// Exp(rate) by inversion on the open unit interval.
double sample_exponential(double rate, RngStream& rng);

}  // namespace cdflab
