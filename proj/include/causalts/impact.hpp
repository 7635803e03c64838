#pragma once

#include <Eigen/Dense>
#include <vector>

#include "causalts/rng.hpp"
#include "causalts/sampler.hpp"
#include "causalts/series.hpp"

namespace causalts {

// Posterior-predictive draws of the untreated outcome path on the original
// scale; rows are posterior draws, columns periods 1..T. Pre-period columns
// are the model-fit check, post-period columns the counterfactual.
struct CounterfactualDraws {
    Eigen::MatrixXd values;  // D x T

    int num_draws() const { return static_cast<int>(values.rows()); }
    int num_periods() const { return static_cast<int>(values.cols()); }
};

CounterfactualDraws predict_counterfactual(const PosteriorDraws& draws,
                                           const ValidatedDataset& dataset, RngStream& rng);

// D x K_max matrix of pointwise effects: observed minus counterfactual for
// the post-intervention periods k = 1..K_max.
Eigen::MatrixXd pointwise_effects(const OutcomeSeries& observed, const CounterfactualDraws& cf,
                                  const InterventionSpec& intervention);

// Running sum across columns of the pointwise draws.
Eigen::MatrixXd cumulative_effects(const Eigen::MatrixXd& pointwise);

// One-sided posterior probability of an effect in the direction of the
// estimate; always in [0.5, 1]. Draws exactly at zero are split evenly.
double tail_probability(const Eigen::VectorXd& draws_at_horizon);

double empirical_quantile(Eigen::VectorXd draws, double prob);

struct IntervalSummary {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct EffectSummary {
    int t_star = 0;
    double alpha = 0.05;
    Eigen::VectorXd observed;                       // length T, original scale
    std::vector<IntervalSummary> counterfactual;    // per period 1..T
    std::vector<IntervalSummary> pointwise;         // per period 1..T (pre rows = fit check)
    std::vector<IntervalSummary> cumulative;        // per period 1..T, 0 before t*
    std::vector<IntervalSummary> pointwise_post;    // k = 1..K_max
    std::vector<IntervalSummary> cumulative_post;   // K = 1..K_max
    double tail_prob = 0.5;
    bool significant = false;

    int num_periods() const { return static_cast<int>(observed.size()); }
    int post_length() const { return num_periods() - t_star + 1; }
    const IntervalSummary& cumulative_at_horizon() const { return cumulative_post.back(); }
};

EffectSummary summarize_impact(const OutcomeSeries& observed, const CounterfactualDraws& cf,
                               const InterventionSpec& intervention, double alpha);

}  // namespace causalts
