// Brute-force reference values for the Hawkes-coupled bias sweep. The
// output is pasted into tests/hawkes_pilot.hpp; rerun only when the sweep
// definition or the simulator's random stream layout changes.

#include <cstdio>

#include "cdflab/experiment.hpp"
#include "cdflab/oracles.hpp"
#include "hawkes_sweep.hpp"

int main()
{
    using namespace cdflab;
    std::printf("// ratio, q, cdf, cdf_se, bias, bias_se  (R = %d, seed = %llu)\n",
                test::pilot_replications,
                static_cast<unsigned long long>(test::pilot_seed));
    for (const auto& point : test::hawkes_sweep_points())
    {
        Scenario s = test::hawkes_sweep_scenario(point.ratio, point.q);
        s.base_seed = test::pilot_seed;
        ExperimentOptions options;
        options.replications = test::pilot_replications;
        options.checkpoints = 0;
        options.verify_compensator = false;
        const ExperimentResult r = run_experiment(s, options);
        const BruteForceCdf cdf = brute_force_cdf(s, test::pilot_replications, test::pilot_seed);
        const auto& bias = r.pooled.uncertainty.at("bias_hat");
        std::printf("    {%.1f, %.2f, %.9g, %.9g, %.9g, %.9g},\n", point.ratio, point.q,
                    cdf.estimate, cdf.standard_error, r.pooled.bias_hat, bias.standard_error);
    }
}
