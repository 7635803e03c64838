#include "causalts/inference.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace causalts {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void symmetrize(Eigen::MatrixXd& m) {
    m = 0.5 * (m + m.transpose()).eval();
}

}  // namespace

int ObservationPlan::num_observed() const {
    int n = 0;
    for (bool o : observed) n += o;
    return n;
}

ObservationPlan make_plan(const Eigen::VectorXd& adjusted_values,
                          const std::vector<bool>& observed) {
    if (static_cast<int>(observed.size()) != adjusted_values.size())
        throw std::invalid_argument("observation flags do not match value length");
    ObservationPlan plan;
    plan.observed = observed;
    plan.value = adjusted_values;
    int n = 0;
    for (int t = 0; t < plan.value.size(); ++t) {
        if (observed[t]) ++n;
        else plan.value(t) = kNaN;
    }
    if (n == 0) throw std::invalid_argument("observation plan needs at least one observed period");
    return plan;
}

ObservationPlan make_counterfactual_plan(const ValidatedDataset& dataset,
                                         const SystemMatrices& system) {
    const int T = dataset.length();
    if (system.num_periods() != T)
        throw std::invalid_argument("system offset length does not match dataset");
    std::vector<bool> observed(T);
    for (int t = 0; t < T; ++t) observed[t] = (t + 1) < dataset.t_star();
    return make_plan(dataset.outcome_std - system.offset, observed);
}

InitialState diffuse_init(int state_dim, double kappa) {
    return {Eigen::VectorXd::Zero(state_dim),
            kappa * Eigen::MatrixXd::Identity(state_dim, state_dim)};
}

FilterResult kalman_filter(const SystemMatrices& system, const ObservationPlan& plan,
                           const InitialState& init) {
    const int T = plan.num_periods();
    const int m = system.state_dim();
    if (init.mean.size() != m || init.cov.rows() != m || init.cov.cols() != m)
        throw std::invalid_argument("initial state dimension mismatch");
    const double H = std::max(system.obs_var, kVarianceFloor);
    const Eigen::MatrixXd RQR = system.state_noise_cov();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);

    FilterResult res;
    res.pred_mean.reserve(T);
    res.pred_cov.reserve(T);
    res.filt_mean.reserve(T);
    res.filt_cov.reserve(T);
    res.innovation = Eigen::VectorXd::Constant(T, kNaN);
    res.innovation_var = Eigen::VectorXd::Constant(T, kNaN);

    Eigen::VectorXd a = init.mean;
    Eigen::MatrixXd P = init.cov;
    for (int t = 0; t < T; ++t) {
        res.pred_mean.push_back(a);
        res.pred_cov.push_back(P);
        if (plan.observed[t]) {
            const double v = plan.value(t) - system.Z.dot(a);
            const Eigen::VectorXd PZ = P * system.Z.transpose();
            const double F = system.Z.dot(PZ) + H;
            if (!(F > 0.0) || !std::isfinite(F))
                throw std::runtime_error("singular innovation variance in Kalman filter");
            const Eigen::VectorXd K = PZ / F;
            a = a + K * v;
            // Joseph form keeps the update positive semidefinite
            const Eigen::MatrixXd L = I - K * system.Z;
            P = L * P * L.transpose() + H * K * K.transpose();
            symmetrize(P);
            res.innovation(t) = v;
            res.innovation_var(t) = F;
            res.log_likelihood -=
                0.5 * (std::log(2.0 * std::numbers::pi) + std::log(F) + v * v / F);
        }
        res.filt_mean.push_back(a);
        res.filt_cov.push_back(P);
        if (!a.allFinite())
            throw std::runtime_error("non-finite state in Kalman filter");
        a = system.transition * a;
        P = system.transition * P * system.transition.transpose() + RQR;
        symmetrize(P);
    }
    if (!std::isfinite(res.log_likelihood))
        throw std::runtime_error("non-finite log-likelihood in Kalman filter");
    return res;
}

SmootherResult kalman_smoother(const FilterResult& filter, const SystemMatrices& system) {
    const int T = static_cast<int>(filter.filt_mean.size());
    SmootherResult res;
    res.mean.resize(T);
    res.cov.resize(T);
    res.mean[T - 1] = filter.filt_mean[T - 1];
    res.cov[T - 1] = filter.filt_cov[T - 1];
    for (int t = T - 2; t >= 0; --t) {
        // J_t = P_{t|t} T' P_{t+1|t}^{-1}
        const Eigen::MatrixXd& Ppred = filter.pred_cov[t + 1];
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Ppred);
        const Eigen::MatrixXd J =
            ldlt.solve(system.transition * filter.filt_cov[t]).transpose();
        res.mean[t] = filter.filt_mean[t] + J * (res.mean[t + 1] - filter.pred_mean[t + 1]);
        res.cov[t] = filter.filt_cov[t] + J * (res.cov[t + 1] - Ppred) * J.transpose();
        symmetrize(res.cov[t]);
        if (!res.mean[t].allFinite())
            throw std::runtime_error("non-finite state in Kalman smoother");
    }
    return res;
}

Eigen::MatrixXd simulate_states(const SystemMatrices& system, const ObservationPlan& plan,
                                const InitialState& init, RngStream& rng) {
    const int T = plan.num_periods();
    const int m = system.state_dim();
    const int q = system.noise_dim();

    // Unconditional draw of states and pseudo-observations from the model.
    Eigen::MatrixXd alpha_plus(T, m);
    Eigen::VectorXd y_plus = Eigen::VectorXd::Constant(T, kNaN);
    const Eigen::LLT<Eigen::MatrixXd> init_chol(init.cov);
    if (init_chol.info() != Eigen::Success)
        throw std::runtime_error("initial state covariance not positive definite");
    Eigen::VectorXd a(m);
    for (int i = 0; i < m; ++i) a(i) = rng.normal();
    a = init.mean + init_chol.matrixL() * a;
    const double obs_sd = std::sqrt(std::max(system.obs_var, kVarianceFloor));
    Eigen::VectorXd noise_sd = system.noise_var.cwiseMax(kVarianceFloor).cwiseSqrt();
    for (int t = 0; t < T; ++t) {
        alpha_plus.row(t) = a.transpose();
        if (plan.observed[t]) y_plus(t) = system.Z.dot(a) + rng.normal(0.0, obs_sd);
        Eigen::VectorXd eta(q);
        for (int i = 0; i < q; ++i) eta(i) = rng.normal(0.0, noise_sd(i));
        a = system.transition * a + system.selector * eta;
    }

    // Mean correction: draw = alpha+ + E[alpha|y] - E[alpha|y+].
    const InitialState init_copy = init;
    const SmootherResult smooth_data =
        kalman_smoother(kalman_filter(system, plan, init_copy), system);
    ObservationPlan plan_plus = plan;
    plan_plus.value = y_plus;
    const SmootherResult smooth_plus =
        kalman_smoother(kalman_filter(system, plan_plus, init_copy), system);

    Eigen::MatrixXd draw(T, m);
    for (int t = 0; t < T; ++t)
        draw.row(t) = alpha_plus.row(t) + (smooth_data.mean[t] - smooth_plus.mean[t]).transpose();
    return draw;
}

}  // namespace causalts
