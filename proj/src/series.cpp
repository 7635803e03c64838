#include "causalts/series.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace causalts {

std::string format_period(const PeriodLabel& p) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%dQ%d", p.year, p.quarter);
    return buf;
}

std::optional<PeriodLabel> parse_period_label(const std::string& text) {
    int year = 0, quarter = 0;
    char trailing = '\0';
    if (std::sscanf(text.c_str(), "%dQ%d%c", &year, &quarter, &trailing) != 2)
        return std::nullopt;
    if (quarter < 1 || quarter > 4 || year < 1)
        return std::nullopt;
    return PeriodLabel{year, quarter};
}

PeriodLabel next_quarter(PeriodLabel p) {
    if (p.quarter == 4) return {p.year + 1, 1};
    return {p.year, p.quarter + 1};
}

int minimum_pre_length(int seasons) {
    return std::max(8, 3 * seasons);
}

namespace {

Standardization pre_period_stats(const Eigen::VectorXd& x, int pre_len, const std::string& what) {
    const auto head = x.head(pre_len);
    const double mean = head.mean();
    const double ss = (head.array() - mean).square().sum();
    const double sd = std::sqrt(ss / (pre_len - 1));
    if (!(sd > 0.0))
        throw std::invalid_argument(what + " has zero pre-period variance");
    return {mean, sd};
}

}  // namespace

ValidatedDataset validate_dataset(const OutcomeSeries& outcome,
                                  const std::optional<CovariateSet>& covariates,
                                  const InterventionSpec& intervention,
                                  const AnalysisConfig& config) {
    const int T = outcome.length();
    if (T < 8)
        throw std::invalid_argument("outcome series must have at least 8 periods");
    if (!outcome.labels.empty()) {
        if (static_cast<int>(outcome.labels.size()) != T)
            throw std::invalid_argument("label count does not match outcome length");
        for (int t = 1; t < T; ++t) {
            if (!(outcome.labels[t] == next_quarter(outcome.labels[t - 1])))
                throw std::invalid_argument("period labels are not contiguous quarters");
        }
    }
    if (!outcome.values.allFinite())
        throw std::invalid_argument("outcome contains missing or non-finite values");

    const int t_star = intervention.t_star;
    if (t_star <= 1 || t_star > T)
        throw std::invalid_argument("intervention period t* must lie in 2..T");

    if (config.seasons < 1)
        throw std::invalid_argument("seasons must be >= 1");
    const int pre_len = t_star - 1;
    if (pre_len < minimum_pre_length(config.seasons))
        throw std::invalid_argument("pre-period shorter than max(8, 3*seasons)");
    if (config.seasons >= pre_len)
        throw std::invalid_argument("seasons must be smaller than the pre-period length");
    if (!(config.credible_level > 0.0 && config.credible_level < 1.0))
        throw std::invalid_argument("credible level must lie in (0, 1)");
    if (config.mcmc.burn_in < 0)
        throw std::invalid_argument("burn-in must be nonnegative");
    if (config.mcmc.kept < 100)
        throw std::invalid_argument("kept draws must be at least 100");
    if (config.mcmc.thin < 1)
        throw std::invalid_argument("thinning must be >= 1");
    if (config.mcmc.chains < 1)
        throw std::invalid_argument("chain count must be >= 1");
    config.priors.check();

    ValidatedDataset out;
    out.outcome = outcome;
    out.intervention = intervention;
    out.config = config;

    out.outcome_scale = pre_period_stats(outcome.values, pre_len, "outcome");
    out.outcome_std = (outcome.values.array() - out.outcome_scale.mean) / out.outcome_scale.sd;

    if (covariates && covariates->count() > 0) {
        CovariateSet cov = *covariates;
        if (cov.values.rows() != T)
            throw std::invalid_argument("covariate row count does not match outcome length");
        if (static_cast<int>(cov.names.size()) != cov.count())
            throw std::invalid_argument("covariate name count does not match column count");
        if (!cov.values.allFinite())
            throw std::invalid_argument("covariates contain missing or non-finite values");
        const int p = cov.count();
        cov.pre_mean.resize(p);
        cov.pre_sd.resize(p);
        out.covariates_std.resize(T, p);
        for (int j = 0; j < p; ++j) {
            const Standardization st =
                pre_period_stats(cov.values.col(j), pre_len, "constant covariate '" + cov.names[j] + "'");
            cov.pre_mean[j] = st.mean;
            cov.pre_sd[j] = st.sd;
            out.covariates_std.col(j) = (cov.values.col(j).array() - st.mean) / st.sd;
        }
        out.covariates = std::move(cov);
    } else {
        out.covariates_std.resize(T, 0);
    }
    return out;
}

ValidatedDataset validate_dataset(const ValidatedDataset& dataset) {
    return validate_dataset(dataset.outcome, dataset.covariates, dataset.intervention,
                            dataset.config);
}

PeriodSplit split_periods(const ValidatedDataset& dataset) {
    return {1, dataset.t_star() - 1, dataset.t_star(), dataset.length()};
}

}  // namespace causalts
