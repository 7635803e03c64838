#pragma once

#include <Eigen/Dense>
#include <vector>

#include "causalts/rng.hpp"
#include "causalts/series.hpp"
#include "causalts/state_space.hpp"

namespace causalts {

// Per-period observation availability. Values are on the standardized scale
// with the regression offset already removed; missing periods hold NaN.
struct ObservationPlan {
    std::vector<bool> observed;
    Eigen::VectorXd value;

    int num_periods() const { return static_cast<int>(value.size()); }
    int num_observed() const;
};

// Plan for fitting/counterfactual work: pre-period observed, post-period
// treated outcomes masked so they never inform the untreated prediction.
ObservationPlan make_counterfactual_plan(const ValidatedDataset& dataset,
                                         const SystemMatrices& system);

ObservationPlan make_plan(const Eigen::VectorXd& adjusted_values,
                          const std::vector<bool>& observed);

// Large-variance proper prior standing in for an exact diffuse start.
struct InitialState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

inline constexpr double kDiffuseVariance = 1e6;

InitialState diffuse_init(int state_dim, double kappa = kDiffuseVariance);

struct FilterResult {
    std::vector<Eigen::VectorXd> pred_mean;   // a_{t|t-1}
    std::vector<Eigen::MatrixXd> pred_cov;    // P_{t|t-1}
    std::vector<Eigen::VectorXd> filt_mean;   // a_{t|t}
    std::vector<Eigen::MatrixXd> filt_cov;    // P_{t|t}
    Eigen::VectorXd innovation;               // NaN at missing periods
    Eigen::VectorXd innovation_var;           // NaN at missing periods
    double log_likelihood = 0.0;
};

FilterResult kalman_filter(const SystemMatrices& system, const ObservationPlan& plan,
                           const InitialState& init);

struct SmootherResult {
    std::vector<Eigen::VectorXd> mean;
    std::vector<Eigen::MatrixXd> cov;
};

SmootherResult kalman_smoother(const FilterResult& filter, const SystemMatrices& system);

// Draws one full state path from p(states | observed data) via the
// mean-correction simulation smoother. Returns a T x m matrix.
Eigen::MatrixXd simulate_states(const SystemMatrices& system, const ObservationPlan& plan,
                                const InitialState& init, RngStream& rng);

}  // namespace causalts
