// Compares the serial reference path of the coverage experiment against the
// OpenMP-parallel path on the same scenario, and checks they agree exactly.
#include <cstdio>
#include <cstdlib>

#include "causalts/oracle.hpp"

using namespace causalts;

int main(int argc, char** argv) {
    ScenarioSpec spec;
    spec.replications = argc > 1 ? std::atoi(argv[1]) : 40;
    spec.seed = 7;

    AnalysisConfig config;
    config.mcmc.burn_in = 300;
    config.mcmc.kept = 700;

    const CoverageResult serial = coverage_experiment(spec, config, /*parallel=*/false);
    const CoverageResult parallel = coverage_experiment(spec, config, /*parallel=*/true);

    std::printf("replications: %d\n", spec.replications);
    std::printf("serial:   %7.2f s  coverage %.3f  bias %.2f\n", serial.seconds,
                serial.coverage, serial.mean_bias);
    std::printf("parallel: %7.2f s  coverage %.3f  bias %.2f\n", parallel.seconds,
                parallel.coverage, parallel.mean_bias);
    std::printf("speedup:  %7.2fx\n", serial.seconds / parallel.seconds);

    if (serial.coverage != parallel.coverage || serial.mean_estimate != parallel.mean_estimate ||
        serial.significant_rate != parallel.significant_rate) {
        std::printf("MISMATCH between serial and parallel results\n");
        return 1;
    }
    std::printf("serial and parallel results identical\n");
    return 0;
}
