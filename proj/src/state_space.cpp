#include "causalts/state_space.hpp"

#include <algorithm>
#include <stdexcept>

namespace causalts {

int state_dimension(const ComponentSet& components) {
    if (components.seasons < 1)
        throw std::invalid_argument("seasons must be >= 1");
    return 2 + (components.seasons > 1 ? components.seasons - 1 : 0);
}

StateLayout state_layout(const ComponentSet& components) {
    StateLayout layout;
    layout.seasonal_dim = components.seasons > 1 ? components.seasons - 1 : 0;
    layout.dim = 2 + layout.seasonal_dim;
    return layout;
}

SystemMatrices assemble_system(const ComponentSet& components,
                               const VarianceSet& variances,
                               const Eigen::VectorXd& beta,
                               const Eigen::MatrixXd& covariates) {
    if (variances.obs < 0 || variances.level < 0 || variances.slope < 0 ||
        variances.seasonal < 0)
        throw std::invalid_argument("variances must be nonnegative");
    if (beta.size() != covariates.cols())
        throw std::invalid_argument("beta length does not match covariate count");
    if (beta.size() != components.num_covariates)
        throw std::invalid_argument("beta length does not match component set");

    const StateLayout layout = state_layout(components);
    const int m = layout.dim;
    const bool seasonal = layout.seasonal_dim > 0;
    const int q = seasonal ? 3 : 2;

    SystemMatrices sys;
    sys.Z = Eigen::RowVectorXd::Zero(m);
    sys.Z(layout.level) = 1.0;
    if (seasonal) sys.Z(layout.seasonal) = 1.0;

    sys.transition = Eigen::MatrixXd::Zero(m, m);
    sys.transition(layout.level, layout.level) = 1.0;
    sys.transition(layout.level, layout.slope) = 1.0;
    sys.transition(layout.slope, layout.slope) = 1.0;
    if (seasonal) {
        const int s0 = layout.seasonal;
        // g_{t+1} = -(g_t + g_{t-1} + ... + g_{t-S+2}) + eta
        for (int j = 0; j < layout.seasonal_dim; ++j)
            sys.transition(s0, s0 + j) = -1.0;
        // shift the remembered seasons down by one
        for (int j = 1; j < layout.seasonal_dim; ++j)
            sys.transition(s0 + j, s0 + j - 1) = 1.0;
    }

    sys.selector = Eigen::MatrixXd::Zero(m, q);
    sys.selector(layout.level, 0) = 1.0;
    sys.selector(layout.slope, 1) = 1.0;
    if (seasonal) sys.selector(layout.seasonal, 2) = 1.0;

    sys.noise_var.resize(q);
    sys.noise_var(0) = std::max(variances.level, kVarianceFloor);
    sys.noise_var(1) = std::max(variances.slope, kVarianceFloor);
    if (seasonal) sys.noise_var(2) = std::max(variances.seasonal, kVarianceFloor);
    sys.obs_var = std::max(variances.obs, kVarianceFloor);

    sys.offset = beta.size() > 0 ? Eigen::VectorXd(covariates * beta)
                                 : Eigen::VectorXd::Zero(covariates.rows());
    return sys;
}

}  // namespace causalts
