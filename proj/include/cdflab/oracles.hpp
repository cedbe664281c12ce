#pragma once

#include <cstdint>
#include <variant>

#include "cdflab/simulator.hpp"

namespace cdflab
{

// Two-state continuous-time Markov description of a scenario with
// exponential up/down laws. `arrival` is either a constant rate or the
// (up, down) pair of a state-modulated intensity.
struct MarkovScenarioParams
{
    struct Constant
    {
        double lambda;
    };
    struct Modulated
    {
        double lambda_up;
        double lambda_down;
    };

    std::variant<Constant, Modulated> arrival;
    double failure_rate;  // mu_f, up -> down
    double repair_rate;   // mu_r, down -> up
    double coupling_q = 0;
};

struct MarkovCdf
{
    double true_cdf = 0;
    double rasmussen_cdf = 0;
    double unavailability = 0;
};

// Stationary analysis of the two-state chain. An arrival that finds
// protections up adds lambda_up * q to the failure rate.
MarkovCdf markov_cdf(const MarkovScenarioParams& p);

// Extract Markov parameters from a scenario; throws UnsupportedScenario for
// Hawkes intensities, rate mixtures, always-down protections or
// non-exponential laws.
MarkovScenarioParams markov_params(const Scenario& s);

// Long-run rate mu / (1 - alpha/beta); throws ValidationError if alpha/beta >= 1.
double hawkes_stationary_rate(double mu, double alpha, double beta);

struct BruteForceCdf
{
    double estimate = 0;
    double standard_error = 0;
};

// Mean of N^D_T / T over `replications` paths seeded with `pilot_seed`.
BruteForceCdf brute_force_cdf(const Scenario& s, int replications, std::uint64_t pilot_seed,
                              int threads = 1);

}  // namespace cdflab
