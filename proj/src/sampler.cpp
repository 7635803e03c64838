#include "causalts/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace causalts {

double draw_variance(const InverseGammaPrior& prior, double sum_sq, int n, RngStream& rng) {
    if (!std::isfinite(sum_sq) || sum_sq < 0.0)
        throw std::runtime_error("non-finite residual sum of squares in variance update");
    const double shape = 0.5 * (prior.nu + n);
    const double scale = 0.5 * (prior.nu * prior.s * prior.s + sum_sq);
    return std::max(rng.inverse_gamma(shape, scale), kVarianceFloor);
}

VarianceSet draw_state_variances(const Eigen::MatrixXd& states, const ComponentSet& components,
                                 const Priors& priors, RngStream& rng) {
    const StateLayout layout = state_layout(components);
    if (states.cols() != layout.dim)
        throw std::invalid_argument("state path does not match state layout");
    const int T = static_cast<int>(states.rows());
    const int n = T - 1;

    double ss_level = 0.0, ss_slope = 0.0, ss_seasonal = 0.0;
    for (int t = 0; t < n; ++t) {
        const double eta_level =
            states(t + 1, layout.level) - states(t, layout.level) - states(t, layout.slope);
        const double eta_slope = states(t + 1, layout.slope) - states(t, layout.slope);
        ss_level += eta_level * eta_level;
        ss_slope += eta_slope * eta_slope;
        if (layout.seasonal_dim > 0) {
            double eta_seasonal = states(t + 1, layout.seasonal);
            for (int j = 0; j < layout.seasonal_dim; ++j)
                eta_seasonal += states(t, layout.seasonal + j);
            ss_seasonal += eta_seasonal * eta_seasonal;
        }
    }

    VarianceSet out;
    out.obs = 0.0;
    out.level = draw_variance(priors.level, ss_level, n, rng);
    out.slope = draw_variance(priors.slope, ss_slope, n, rng);
    out.seasonal = layout.seasonal_dim > 0
                       ? draw_variance(priors.seasonal, ss_seasonal, n, rng)
                       : kVarianceFloor;
    return out;
}

double draw_observation_variance(const Eigen::VectorXd& residuals, const Priors& priors,
                                 RngStream& rng) {
    return draw_variance(priors.obs, residuals.squaredNorm(),
                         static_cast<int>(residuals.size()), rng);
}

Eigen::VectorXd draw_beta(const Eigen::VectorXd& target, const Eigen::MatrixXd& covariates,
                          double obs_var, const Priors& priors, RngStream& rng) {
    const int p = static_cast<int>(covariates.cols());
    if (p < 1) throw std::invalid_argument("draw_beta requires at least one covariate");
    if (target.size() != covariates.rows())
        throw std::invalid_argument("target length does not match covariate rows");
    const double tau2 = priors.beta_sd * priors.beta_sd;
    Eigen::MatrixXd precision =
        Eigen::MatrixXd::Identity(p, p) / tau2 +
        covariates.transpose() * covariates / obs_var;
    const Eigen::LLT<Eigen::MatrixXd> chol(precision);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("singular precision in beta update");
    const Eigen::VectorXd mean = chol.solve(covariates.transpose() * target / obs_var);
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z(i) = rng.normal();
    // draw = mean + L^{-T} z, where precision = L L'
    return mean + chol.matrixU().solve(z);
}

PosteriorDraws run_gibbs(const ValidatedDataset& dataset) {
    const McmcSettings& mcmc = dataset.config.mcmc;
    const Priors& priors = dataset.config.priors;
    const int T = dataset.length();
    const int p = dataset.covariate_count();
    const int pre_len = dataset.pre_length();
    const ComponentSet components{dataset.config.seasons, p};
    const StateLayout layout = state_layout(components);
    const InitialState init = diffuse_init(layout.dim);

    const Eigen::MatrixXd x_pre = dataset.covariates_std.topRows(pre_len);
    const Eigen::VectorXd y_pre = dataset.outcome_std.head(pre_len);

    PosteriorDraws out;
    out.seed = mcmc.seed;
    out.chains = mcmc.chains;
    out.variances.reserve(static_cast<std::size_t>(mcmc.kept) * mcmc.chains);
    out.beta.reserve(out.variances.capacity());
    out.states.reserve(out.variances.capacity());

    RngStream root(mcmc.seed);
    for (int chain = 0; chain < mcmc.chains; ++chain) {
        RngStream rng = root.substream(static_cast<std::uint64_t>(chain));
        VarianceSet variances{priors.obs.s * priors.obs.s,
                              priors.level.s * priors.level.s,
                              priors.slope.s * priors.slope.s,
                              priors.seasonal.s * priors.seasonal.s};
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);

        const int total = mcmc.burn_in + mcmc.kept * mcmc.thin;
        for (int iter = 0; iter < total; ++iter) {
            try {
                const SystemMatrices system =
                    assemble_system(components, variances, beta, dataset.covariates_std);
                const ObservationPlan plan = make_counterfactual_plan(dataset, system);
                const Eigen::MatrixXd states = simulate_states(system, plan, init, rng);

                variances = draw_state_variances(states, components, priors, rng);
                const Eigen::VectorXd fitted_pre =
                    states.topRows(pre_len) * system.Z.transpose();
                variances.obs = draw_observation_variance(
                    y_pre - fitted_pre - system.offset.head(pre_len), priors, rng);
                if (p > 0)
                    beta = draw_beta(y_pre - fitted_pre, x_pre, variances.obs, priors, rng);

                const int kept_index = iter - mcmc.burn_in;
                if (kept_index >= 0 && (kept_index + 1) % mcmc.thin == 0) {
                    out.variances.push_back(variances);
                    out.beta.push_back(beta);
                    out.states.push_back(states);
                }
            } catch (const std::runtime_error& e) {
                throw std::runtime_error("gibbs chain " + std::to_string(chain) +
                                         " iteration " + std::to_string(iter) + ": " + e.what());
            }
        }
    }
    return out;
}

namespace {

double chain_variance(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / (x.size() - 1);
}

}  // namespace

double effective_sample_size(const Eigen::VectorXd& chain) {
    const int n = static_cast<int>(chain.size());
    if (n < 4) return static_cast<double>(n);
    const double mean = chain.mean();
    const double var = (chain.array() - mean).square().sum() / n;
    if (!(var > 0.0)) return static_cast<double>(n);

    // Geyer initial positive sequence on paired autocorrelations.
    double tau = 1.0;
    double prev_pair = 2.0;
    for (int k = 1; k + 1 < n; k += 2) {
        double rho_k = 0.0, rho_k1 = 0.0;
        for (int t = 0; t + k < n; ++t) rho_k += (chain(t) - mean) * (chain(t + k) - mean);
        for (int t = 0; t + k + 1 < n; ++t)
            rho_k1 += (chain(t) - mean) * (chain(t + k + 1) - mean);
        rho_k /= n * var;
        rho_k1 /= n * var;
        double pair = rho_k + rho_k1;
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);  // enforce monotone decay
        tau += 2.0 * pair;
        prev_pair = pair;
    }
    return std::min(static_cast<double>(n), n / tau);
}

double split_rhat(const Eigen::VectorXd& chain, int chains) {
    const int n = static_cast<int>(chain.size());
    const int splits = 2 * std::max(chains, 1);
    const int len = n / splits;
    if (len < 2) return 1.0;

    Eigen::VectorXd means(splits), vars(splits);
    for (int j = 0; j < splits; ++j) {
        const Eigen::VectorXd seg = chain.segment(j * len, len);
        means(j) = seg.mean();
        vars(j) = chain_variance(seg);
    }
    const double W = vars.mean();
    const double B = len * chain_variance(means);
    if (!(W > 0.0)) return 1.0;
    const double var_plus = (len - 1.0) / len * W + B / len;
    return std::sqrt(var_plus / W);
}

ChainDiagnostics compute_diagnostics(const PosteriorDraws& draws) {
    const int n = draws.num_kept();
    ChainDiagnostics diag;
    auto add = [&](const std::string& name, auto getter) {
        Eigen::VectorXd chain(n);
        for (int i = 0; i < n; ++i) chain(i) = getter(i);
        diag.names.push_back(name);
        diag.ess.push_back(effective_sample_size(chain));
        diag.rhat.push_back(split_rhat(chain, draws.chains));
    };
    add("sigma2_obs", [&](int i) { return draws.variances[i].obs; });
    add("sigma2_level", [&](int i) { return draws.variances[i].level; });
    add("sigma2_slope", [&](int i) { return draws.variances[i].slope; });
    add("sigma2_seasonal", [&](int i) { return draws.variances[i].seasonal; });
    const int p = n > 0 ? static_cast<int>(draws.beta.front().size()) : 0;
    for (int j = 0; j < p; ++j)
        add("beta_" + std::to_string(j), [&, j](int i) { return draws.beta[i](j); });
    return diag;
}

}  // namespace causalts
