#include "causalts/oracle.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "causalts/impact.hpp"

namespace causalts {

SyntheticData generate_synthetic(const ScenarioSpec& spec, RngStream& rng) {
    const int T = spec.num_periods;
    const int S = spec.seasons;
    const int p = spec.num_covariates;
    if (T < 2 || spec.t_star < 2 || spec.t_star > T)
        throw std::invalid_argument("invalid scenario dimensions");
    if (spec.beta.size() != p)
        throw std::invalid_argument("scenario beta length does not match covariate count");

    const double sd_level = std::sqrt(spec.variances.level);
    const double sd_slope = std::sqrt(spec.variances.slope);
    const double sd_seasonal = std::sqrt(spec.variances.seasonal);
    const double sd_obs = std::sqrt(spec.variances.obs);

    // Seasonal history: S-1 lags, recursion per the rotating-block form.
    std::vector<double> seasonal(std::max(S - 1, 0));
    for (double& g : seasonal) g = rng.normal(0.0, sd_seasonal);

    Eigen::MatrixXd covariates(T, p);
    for (int j = 0; j < p; ++j) {
        // smooth-ish covariate paths: random walk around a linear drift
        double x = rng.normal(0.0, 1.0);
        const double drift = rng.normal(0.0, 0.05);
        for (int t = 0; t < T; ++t) {
            covariates(t, j) = x + drift * t;
            x += rng.normal(0.0, 0.3);
        }
    }

    Eigen::VectorXd y(T);
    double level = spec.initial_level;
    double slope = spec.initial_slope;
    for (int t = 0; t < T; ++t) {
        double season_now = 0.0;
        if (S > 1) season_now = seasonal.front();
        double mean = level + season_now;
        for (int j = 0; j < p; ++j) mean += spec.beta(j) * covariates(t, j);
        y(t) = mean + rng.normal(0.0, sd_obs);

        // advance states
        const double new_level = level + slope + rng.normal(0.0, sd_level);
        slope += rng.normal(0.0, sd_slope);
        level = new_level;
        if (S > 1) {
            double next = rng.normal(0.0, sd_seasonal);
            for (double g : seasonal) next -= g;
            for (int j = static_cast<int>(seasonal.size()) - 1; j > 0; --j)
                seasonal[j] = seasonal[j - 1];
            seasonal[0] = next;
        }
    }

    const int K = T - spec.t_star + 1;
    Eigen::VectorXd true_delta = Eigen::VectorXd::Zero(K);
    for (int k = 0; k < K; ++k) {
        switch (spec.effect) {
            case EffectShape::none: break;
            case EffectShape::step: true_delta(k) = spec.effect_size; break;
            case EffectShape::ramp: true_delta(k) = spec.effect_size * (k + 1); break;
        }
        y(spec.t_star - 1 + k) += true_delta(k);
    }
    Eigen::VectorXd true_cum = true_delta;
    for (int k = 1; k < K; ++k) true_cum(k) += true_cum(k - 1);

    SyntheticData data;
    data.outcome.values = y;
    if (p > 0) {
        CovariateSet cov;
        cov.values = covariates;
        for (int j = 0; j < p; ++j) cov.names.push_back("x" + std::to_string(j + 1));
        data.covariates = std::move(cov);
    }
    data.intervention = {spec.t_star};
    data.true_pointwise = true_delta;
    data.true_cumulative = true_cum;
    return data;
}

namespace {

constexpr int kDenseCap = 12;

// The stacked joint spans scales from obs_var up to the kappa-sized diffuse
// prior, so the brute-force route is carried out in extended precision.
using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Stacked Gaussian for (alpha_1..alpha_T): mean zero, covariance built by
// direct moment propagation. Deliberately avoids the Kalman recursions.
struct DenseJoint {
    MatrixXld state_cov;   // (T*m) x (T*m)
    MatrixXld obs_cov;     // n_obs x n_obs
    MatrixXld cross;       // (T*m) x n_obs, Cov(alpha, y_obs)
    VectorXld obs_value;   // n_obs; joint mean is zero
    int T = 0;
    int m = 0;
};

DenseJoint build_dense_joint(const SystemMatrices& system, const ObservationPlan& plan,
                             double kappa) {
    const int T = plan.num_periods();
    const int m = system.state_dim();
    if (T > kDenseCap) throw std::invalid_argument("dense oracle capped at T <= 12");
    if (plan.num_observed() < 1)
        throw std::invalid_argument("dense oracle needs at least one observation");

    const MatrixXld transition = system.transition.cast<long double>();
    const MatrixXld RQR = system.state_noise_cov().cast<long double>();
    MatrixXld A = MatrixXld::Zero(T * m, T * m);
    A.block(0, 0, m, m) =
        static_cast<long double>(kappa) * MatrixXld::Identity(m, m);
    for (int t = 1; t < T; ++t) {
        // cross blocks: Cov(alpha_t, alpha_u) = Tmat * Cov(alpha_{t-1}, alpha_u)
        for (int u = 0; u < t; ++u) {
            A.block(t * m, u * m, m, m) = transition * A.block((t - 1) * m, u * m, m, m);
            A.block(u * m, t * m, m, m) = A.block(t * m, u * m, m, m).transpose();
        }
        A.block(t * m, t * m, m, m) =
            transition * A.block((t - 1) * m, (t - 1) * m, m, m) * transition.transpose() + RQR;
    }

    std::vector<int> obs_periods;
    for (int t = 0; t < T; ++t)
        if (plan.observed[t]) obs_periods.push_back(t);
    const int n = static_cast<int>(obs_periods.size());

    // y_t = Z alpha_t + eps_t (offset already removed from plan values)
    MatrixXld Zbig = MatrixXld::Zero(n, T * m);
    for (int i = 0; i < n; ++i)
        Zbig.block(i, obs_periods[i] * m, 1, m) = system.Z.cast<long double>();

    DenseJoint joint;
    joint.T = T;
    joint.m = m;
    joint.state_cov = std::move(A);
    joint.cross = joint.state_cov * Zbig.transpose();
    joint.obs_cov = Zbig * joint.cross +
                    static_cast<long double>(system.obs_var) * MatrixXld::Identity(n, n);
    joint.obs_value.resize(n);
    for (int i = 0; i < n; ++i)
        joint.obs_value(i) = static_cast<long double>(plan.value(obs_periods[i]));
    return joint;
}

}  // namespace

double dense_gaussian_loglik(const SystemMatrices& system, const ObservationPlan& plan,
                             double kappa) {
    const DenseJoint joint = build_dense_joint(system, plan, kappa);
    const int n = static_cast<int>(joint.obs_value.size());
    const Eigen::LDLT<MatrixXld> ldlt(joint.obs_cov);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0L).any())
        throw std::runtime_error("dense joint covariance is not positive definite");
    const long double logdet = ldlt.vectorD().array().log().sum();
    const long double quad = joint.obs_value.dot(ldlt.solve(joint.obs_value));
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    return static_cast<double>(-0.5L * (n * std::log(two_pi) + logdet + quad));
}

DenseMoments dense_conditional_moments(const SystemMatrices& system, const ObservationPlan& plan,
                                       double kappa) {
    const DenseJoint joint = build_dense_joint(system, plan, kappa);
    const Eigen::LDLT<MatrixXld> ldlt(joint.obs_cov);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("dense joint covariance is not positive definite");
    const VectorXld mean_all = joint.cross * ldlt.solve(joint.obs_value);
    const MatrixXld cov_all =
        joint.state_cov - joint.cross * ldlt.solve(joint.cross.transpose());

    DenseMoments out;
    const int T = joint.T, m = joint.m;
    for (int t = 0; t < T; ++t) {
        out.mean.push_back(mean_all.segment(t * m, m).cast<double>());
        out.cov.push_back(cov_all.block(t * m, t * m, m, m).cast<double>());
    }
    return out;
}

VerificationReport run_verification(int num_systems, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    RngStream root(seed);
    VerificationReport report;
    report.systems = num_systems;

    for (int i = 0; i < num_systems; ++i) {
        RngStream rng = root.substream(static_cast<std::uint64_t>(i));
        const int S = (i % 2 == 0) ? 1 : 4;
        const int p = (i % 4 < 2) ? 0 : 2;
        const int T = 4 + static_cast<int>(rng.uniform() * 9);  // 4..12
        const ComponentSet components{S, p};

        VarianceSet variances;
        variances.obs = rng.uniform(0.05, 1.5);
        variances.level = rng.uniform(0.01, 1.0);
        variances.slope = rng.uniform(0.001, 0.2);
        variances.seasonal = S > 1 ? rng.uniform(0.01, 0.5) : 0.0;
        Eigen::VectorXd beta(p);
        Eigen::MatrixXd covariates(T, p);
        for (int j = 0; j < p; ++j) {
            beta(j) = rng.normal(0.0, 1.0);
            for (int t = 0; t < T; ++t) covariates(t, j) = rng.normal(0.0, 1.0);
        }
        const SystemMatrices system = assemble_system(components, variances, beta, covariates);

        Eigen::VectorXd y(T);
        for (int t = 0; t < T; ++t) y(t) = rng.normal(0.0, 2.0);
        // half the systems get a random missing pattern, at least one observed
        std::vector<bool> observed(T, true);
        if (i % 2 == 1) {
            for (int t = 0; t < T; ++t) observed[t] = rng.uniform() > 0.3;
            observed[static_cast<int>(rng.uniform() * T) % T] = true;
        }
        const ObservationPlan plan = make_plan(y - system.offset, observed);
        const InitialState init = diffuse_init(system.state_dim());

        const FilterResult filter = kalman_filter(system, plan, init);
        const double oracle_ll = dense_gaussian_loglik(system, plan);
        const double rel_err = std::abs(filter.log_likelihood - oracle_ll) /
                               std::max(1.0, std::abs(oracle_ll));
        report.max_loglik_rel_err = std::max(report.max_loglik_rel_err, rel_err);

        const SmootherResult smooth = kalman_smoother(filter, system);
        const DenseMoments dense = dense_conditional_moments(system, plan);
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < system.state_dim(); ++j) {
                const double ref = dense.mean[t](j);
                const double err =
                    std::abs(smooth.mean[t](j) - ref) / std::max(1.0, std::abs(ref));
                report.max_smoother_mean_err = std::max(report.max_smoother_mean_err, err);
                const double vref = dense.cov[t](j, j);
                const double verr =
                    std::abs(smooth.cov[t](j, j) - vref) / std::max(1.0, std::abs(vref));
                report.max_smoother_cov_err = std::max(report.max_smoother_cov_err, verr);
            }
        }
    }

    report.loglik_ok = report.max_loglik_rel_err < 1e-8;
    report.smoother_ok =
        report.max_smoother_mean_err < 1e-6 && report.max_smoother_cov_err < 1e-6;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

CoverageResult coverage_experiment(const ScenarioSpec& spec, const AnalysisConfig& config,
                                   bool parallel) {
    if (spec.replications < 1)
        throw std::invalid_argument("coverage experiment needs at least one replication");
    const auto start = std::chrono::steady_clock::now();
    const int R = spec.replications;
    RngStream root(spec.seed);

    std::vector<double> estimates(R), covered(R), significant(R);
    double true_cum = 0.0;
    {
        // the injected effect is deterministic, so any replication's truth works
        RngStream probe = root.substream(0);
        true_cum = generate_synthetic(spec, probe).true_cumulative.tail(1)(0);
    }

    auto run_one = [&](int r) {
        RngStream rng = root.substream(static_cast<std::uint64_t>(r) + 1);
        const SyntheticData data = generate_synthetic(spec, rng);
        AnalysisConfig rep_config = config;
        rep_config.mcmc.seed = rng.next_u64();
        const ValidatedDataset dataset =
            validate_dataset(data.outcome, data.covariates, data.intervention, rep_config);
        const PosteriorDraws draws = run_gibbs(dataset);
        RngStream pred_rng = rng.substream(7);
        const CounterfactualDraws cf = predict_counterfactual(draws, dataset, pred_rng);
        const EffectSummary summary = summarize_impact(
            data.outcome, cf, data.intervention, 1.0 - rep_config.credible_level);
        const IntervalSummary& horizon = summary.cumulative_at_horizon();
        const double truth = data.true_cumulative.tail(1)(0);
        estimates[r] = horizon.mean;
        covered[r] = (horizon.lower <= truth && truth <= horizon.upper) ? 1.0 : 0.0;
        significant[r] = summary.significant ? 1.0 : 0.0;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < R; ++r) run_one(r);
    } else {
        for (int r = 0; r < R; ++r) run_one(r);
    }

    CoverageResult result;
    result.replications = R;
    result.true_cumulative = true_cum;
    for (int r = 0; r < R; ++r) {
        result.coverage += covered[r];
        result.mean_estimate += estimates[r];
        result.significant_rate += significant[r];
    }
    result.coverage /= R;
    result.mean_estimate /= R;
    result.significant_rate /= R;
    result.mean_bias = result.mean_estimate - true_cum;
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace causalts
