#include "causalts/impact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace causalts {

CounterfactualDraws predict_counterfactual(const PosteriorDraws& draws,
                                           const ValidatedDataset& dataset, RngStream& rng) {
    const int D = draws.num_kept();
    const int T = dataset.length();
    if (D == 0) throw std::invalid_argument("no posterior draws");
    const ComponentSet components{dataset.config.seasons, dataset.covariate_count()};
    const StateLayout layout = state_layout(components);

    CounterfactualDraws cf;
    cf.values.resize(D, T);
    for (int d = 0; d < D; ++d) {
        const Eigen::MatrixXd& states = draws.states[d];
        const double obs_sd = std::sqrt(draws.variances[d].obs);
        Eigen::VectorXd offset = Eigen::VectorXd::Zero(T);
        if (dataset.covariate_count() > 0) offset = dataset.covariates_std * draws.beta[d];
        for (int t = 0; t < T; ++t) {
            double mean_std = states(t, layout.level) + offset(t);
            if (layout.seasonal_dim > 0) mean_std += states(t, layout.seasonal);
            const double y_std = mean_std + rng.normal(0.0, obs_sd);
            cf.values(d, t) = dataset.outcome_scale.invert(y_std);
        }
    }
    if (!cf.values.allFinite())
        throw std::runtime_error("non-finite counterfactual draws");
    return cf;
}

Eigen::MatrixXd pointwise_effects(const OutcomeSeries& observed, const CounterfactualDraws& cf,
                                  const InterventionSpec& intervention) {
    const int T = observed.length();
    if (cf.num_periods() != T)
        throw std::invalid_argument("counterfactual period count does not match outcome");
    const int K = T - intervention.t_star + 1;
    Eigen::MatrixXd delta(cf.num_draws(), K);
    for (int k = 0; k < K; ++k) {
        const int t = intervention.t_star - 1 + k;  // 0-based period index
        delta.col(k) = observed.values(t) - cf.values.col(t).array();
    }
    return delta;
}

Eigen::MatrixXd cumulative_effects(const Eigen::MatrixXd& pointwise) {
    Eigen::MatrixXd cum = pointwise;
    for (int k = 1; k < cum.cols(); ++k) cum.col(k) += cum.col(k - 1);
    return cum;
}

double tail_probability(const Eigen::VectorXd& draws_at_horizon) {
    const int n = static_cast<int>(draws_at_horizon.size());
    if (n < 100) throw std::invalid_argument("tail probability requires at least 100 draws");
    double pos = 0.0, neg = 0.0;
    for (int i = 0; i < n; ++i) {
        if (draws_at_horizon(i) > 0.0) pos += 1.0;
        else if (draws_at_horizon(i) < 0.0) neg += 1.0;
        else { pos += 0.5; neg += 0.5; }
    }
    return std::max(pos, neg) / n;
}

double empirical_quantile(Eigen::VectorXd draws, double prob) {
    const int n = static_cast<int>(draws.size());
    if (n == 0) throw std::invalid_argument("quantile of empty sample");
    std::sort(draws.data(), draws.data() + n);
    const double h = (n - 1) * std::clamp(prob, 0.0, 1.0);
    const int lo = static_cast<int>(std::floor(h));
    const int hi = std::min(lo + 1, n - 1);
    return draws(lo) + (h - lo) * (draws(hi) - draws(lo));
}

namespace {

IntervalSummary summarize_column(const Eigen::VectorXd& col, double alpha) {
    return {col.mean(), empirical_quantile(col, alpha / 2.0),
            empirical_quantile(col, 1.0 - alpha / 2.0)};
}

}  // namespace

EffectSummary summarize_impact(const OutcomeSeries& observed, const CounterfactualDraws& cf,
                               const InterventionSpec& intervention, double alpha) {
    const int T = observed.length();
    const int t_star = intervention.t_star;

    EffectSummary summary;
    summary.t_star = t_star;
    summary.alpha = alpha;
    summary.observed = observed.values;

    for (int t = 0; t < T; ++t)
        summary.counterfactual.push_back(summarize_column(cf.values.col(t), alpha));

    // Pointwise over every period: pre-period rows double as the fit check.
    for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd diff = observed.values(t) - cf.values.col(t).array();
        summary.pointwise.push_back(summarize_column(diff, alpha));
    }

    const Eigen::MatrixXd delta = pointwise_effects(observed, cf, intervention);
    const Eigen::MatrixXd cum = cumulative_effects(delta);
    for (int k = 0; k < delta.cols(); ++k) {
        summary.pointwise_post.push_back(summarize_column(delta.col(k), alpha));
        summary.cumulative_post.push_back(summarize_column(cum.col(k), alpha));
    }

    // Cumulative panel: defined as exactly 0 before t*.
    for (int t = 0; t < t_star - 1; ++t) summary.cumulative.push_back({0.0, 0.0, 0.0});
    for (int k = 0; k < cum.cols(); ++k) summary.cumulative.push_back(summary.cumulative_post[k]);

    const Eigen::VectorXd horizon = cum.col(cum.cols() - 1);
    summary.tail_prob = tail_probability(horizon);
    const IntervalSummary& final_interval = summary.cumulative_post.back();
    summary.significant = final_interval.lower > 0.0 || final_interval.upper < 0.0;
    return summary;
}

}  // namespace causalts
