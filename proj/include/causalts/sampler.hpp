#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "causalts/inference.hpp"
#include "causalts/priors.hpp"
#include "causalts/series.hpp"
#include "causalts/state_space.hpp"

namespace causalts {

struct PosteriorDraws {
    std::vector<VarianceSet> variances;
    std::vector<Eigen::VectorXd> beta;        // empty vectors when p == 0
    std::vector<Eigen::MatrixXd> states;      // T x m per draw
    std::uint64_t seed = 0;
    int chains = 1;

    int num_kept() const { return static_cast<int>(variances.size()); }
};

// One conditional inverse-gamma update:
// sigma^2 ~ IG(nu/2 + n/2, (nu*s^2 + sum_sq)/2).
double draw_variance(const InverseGammaPrior& prior, double sum_sq, int n, RngStream& rng);

// Trend/seasonal variance updates from the disturbances implied by a state
// path. The obs field of the result is left at 0 for the caller to fill.
VarianceSet draw_state_variances(const Eigen::MatrixXd& states, const ComponentSet& components,
                                 const Priors& priors, RngStream& rng);

double draw_observation_variance(const Eigen::VectorXd& residuals, const Priors& priors,
                                 RngStream& rng);

// Gaussian conditional for beta: precision I/beta_sd^2 + X'X/obs_var,
// mean = precision^{-1} X' target / obs_var.
Eigen::VectorXd draw_beta(const Eigen::VectorXd& target, const Eigen::MatrixXd& covariates,
                          double obs_var, const Priors& priors, RngStream& rng);

PosteriorDraws run_gibbs(const ValidatedDataset& dataset);

struct ChainDiagnostics {
    std::vector<std::string> names;
    std::vector<double> ess;
    std::vector<double> rhat;  // split-chain scale reduction
};

ChainDiagnostics compute_diagnostics(const PosteriorDraws& draws);

double effective_sample_size(const Eigen::VectorXd& chain);
double split_rhat(const Eigen::VectorXd& chain, int chains);

}  // namespace causalts
