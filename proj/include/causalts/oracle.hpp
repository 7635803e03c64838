#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "causalts/inference.hpp"
#include "causalts/series.hpp"
#include "causalts/state_space.hpp"

namespace causalts {

enum class EffectShape { none, step, ramp };

// Generator settings for synthetic scenarios. Everything is on the raw
// outcome scale; the effect is added to the observed series from t* onward.
struct ScenarioSpec {
    int num_periods = 64;
    int t_star = 46;
    int seasons = 4;
    int num_covariates = 0;
    VarianceSet variances{400.0, 4.0, 0.04, 100.0};
    Eigen::VectorXd beta;  // length num_covariates
    EffectShape effect = EffectShape::none;
    double effect_size = 0.0;  // per-period step, or ramp slope
    double initial_level = 1000.0;
    double initial_slope = 2.0;
    int replications = 200;
    std::uint64_t seed = 1;
};

struct SyntheticData {
    OutcomeSeries outcome;
    std::optional<CovariateSet> covariates;
    InterventionSpec intervention;
    Eigen::VectorXd true_pointwise;   // length K_max
    Eigen::VectorXd true_cumulative;  // length K_max
};

SyntheticData generate_synthetic(const ScenarioSpec& spec, RngStream& rng);

// Brute-force log-likelihood of the observed coordinates via the dense joint
// Gaussian of the stacked states and observations. Capped at T <= 12.
double dense_gaussian_loglik(const SystemMatrices& system, const ObservationPlan& plan,
                             double kappa = kDiffuseVariance);

struct DenseMoments {
    std::vector<Eigen::VectorXd> mean;
    std::vector<Eigen::MatrixXd> cov;
};

// Exact smoothed moments by block Gaussian conditioning. Capped at T <= 12.
DenseMoments dense_conditional_moments(const SystemMatrices& system, const ObservationPlan& plan,
                                       double kappa = kDiffuseVariance);

struct VerificationReport {
    int systems = 0;
    double max_loglik_rel_err = 0.0;
    double max_smoother_mean_err = 0.0;
    double max_smoother_cov_err = 0.0;
    bool loglik_ok = false;
    bool smoother_ok = false;
    double seconds = 0.0;
};

// Randomized filter-vs-oracle equivalence sweep over small systems with
// S in {1,4}, p in {0,2}, with and without missing observations.
VerificationReport run_verification(int num_systems, std::uint64_t seed);

struct CoverageResult {
    int replications = 0;
    double true_cumulative = 0.0;
    double coverage = 0.0;           // fraction of intervals containing the truth
    double mean_estimate = 0.0;      // mean posterior mean of the cumulative effect
    double mean_bias = 0.0;
    double significant_rate = 0.0;
    double seconds = 0.0;
};

// Full-pipeline calibration experiment; replications run in parallel when
// `parallel` is set, with per-replication substreams so results match the
// serial reference exactly.
CoverageResult coverage_experiment(const ScenarioSpec& spec, const AnalysisConfig& config,
                                   bool parallel = true);

}  // namespace causalts
