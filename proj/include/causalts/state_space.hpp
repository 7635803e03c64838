#pragma once

#include <Eigen/Dense>

namespace causalts {

// Smallest representable variance inside the filter and sampler.
inline constexpr double kVarianceFloor = 1e-12;

// Which latent components the model carries. The local linear trend is
// always present; seasons == 1 disables the seasonal block.
struct ComponentSet {
    int seasons = 1;
    int num_covariates = 0;
};

// State vector ordering: [level, slope] then, when seasons > 1, the rotating
// seasonal block [g_t, g_{t-1}, ..., g_{t-S+2}].
struct StateLayout {
    int level = 0;
    int slope = 1;
    int seasonal = 2;      // offset of the current seasonal state; unused when seasonal_dim == 0
    int seasonal_dim = 0;  // S - 1, or 0 when seasons == 1
    int dim = 2;
};

int state_dimension(const ComponentSet& components);
StateLayout state_layout(const ComponentSet& components);

struct VarianceSet {
    double obs = 1.0;
    double level = 0.0;
    double slope = 0.0;
    double seasonal = 0.0;
};

// Canonical linear-Gaussian form:
//   y_t     = Z a_t + offset_t + eps_t,        eps_t ~ N(0, obs_var)
//   a_{t+1} = transition a_t + selector eta_t, eta_t ~ N(0, diag(noise_var))
struct SystemMatrices {
    Eigen::RowVectorXd Z;          // 1 x m
    Eigen::MatrixXd transition;    // m x m
    Eigen::MatrixXd selector;      // m x q
    Eigen::VectorXd noise_var;     // q
    double obs_var = 1.0;
    Eigen::VectorXd offset;        // length T regression offset x_t' beta

    int state_dim() const { return static_cast<int>(Z.cols()); }
    int noise_dim() const { return static_cast<int>(noise_var.size()); }
    int num_periods() const { return static_cast<int>(offset.size()); }
    Eigen::MatrixXd state_noise_cov() const {
        return selector * noise_var.asDiagonal() * selector.transpose();
    }
};

// covariates is T x p (standardized); pass a T x 0 matrix when p == 0.
SystemMatrices assemble_system(const ComponentSet& components,
                               const VarianceSet& variances,
                               const Eigen::VectorXd& beta,
                               const Eigen::MatrixXd& covariates);

}  // namespace causalts
