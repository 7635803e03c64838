#pragma once

#include <stdexcept>

namespace causalts {

// Prior hyperparameters on the standardized scale. Each variance gets an
// inverse-gamma(nu/2, nu*s^2/2); regression coefficients get independent
// N(0, beta_sd^2).
struct InverseGammaPrior {
    double nu;
    double s;
};

struct Priors {
    InverseGammaPrior obs{5.0, 0.5};
    InverseGammaPrior level{1.0, 0.01};
    InverseGammaPrior slope{1.0, 0.01};
    InverseGammaPrior seasonal{1.0, 0.01};
    double beta_sd = 1.0;

    void check() const {
        for (const auto& p : {obs, level, slope, seasonal}) {
            if (!(p.nu > 0.0) || !(p.s > 0.0))
                throw std::invalid_argument("prior hyperparameters must be positive");
        }
        if (!(beta_sd > 0.0))
            throw std::invalid_argument("beta prior sd must be positive");
    }
};

}  // namespace causalts
