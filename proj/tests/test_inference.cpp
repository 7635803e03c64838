#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "causalts/inference.hpp"
#include "causalts/oracle.hpp"

using namespace causalts;

namespace {

SystemMatrices random_system(RngStream& rng, int S, int T) {
    VarianceSet v;
    v.obs = rng.uniform(0.05, 1.0);
    v.level = rng.uniform(0.01, 0.5);
    v.slope = rng.uniform(0.001, 0.1);
    v.seasonal = S > 1 ? rng.uniform(0.01, 0.3) : 0.0;
    return assemble_system({S, 0}, v, Eigen::VectorXd(), Eigen::MatrixXd(T, 0));
}

Eigen::VectorXd random_series(RngStream& rng, int T) {
    Eigen::VectorXd y(T);
    for (int t = 0; t < T; ++t) y(t) = rng.normal(0.0, 1.5);
    return y;
}

}  // namespace

TEST_CASE("noiseless constant series pins the filtered level") {
    const int T = 8;
    const SystemMatrices sys =
        assemble_system({1, 0}, {0.0, 0.0, 0.0, 0.0}, Eigen::VectorXd(), Eigen::MatrixXd(T, 0));
    CHECK(sys.obs_var == kVarianceFloor);  // zero variances are floored, not accepted
    const double c = 4.25;
    const ObservationPlan plan =
        make_plan(Eigen::VectorXd::Constant(T, c), std::vector<bool>(T, true));
    const FilterResult filter = kalman_filter(sys, plan, diffuse_init(2));
    for (int t = 0; t < T; ++t)
        CHECK(filter.filt_mean[t](0) == doctest::Approx(c).epsilon(1e-9));
}

TEST_CASE("filter log-likelihood matches the dense oracle") {
    RngStream rng(314);
    const int T = 6;
    const SystemMatrices sys = random_system(rng, 1, T);
    const Eigen::VectorXd y = random_series(rng, T);

    SUBCASE("all observed") {
        const ObservationPlan plan = make_plan(y, std::vector<bool>(T, true));
        const double ll = kalman_filter(sys, plan, diffuse_init(2)).log_likelihood;
        const double oracle = dense_gaussian_loglik(sys, plan);
        CHECK(std::abs(ll - oracle) <= 1e-8 * std::abs(oracle));
    }
    SUBCASE("period 4 missing marginalizes the dense Gaussian") {
        std::vector<bool> observed(T, true);
        observed[3] = false;
        const ObservationPlan plan = make_plan(y, observed);
        const double ll = kalman_filter(sys, plan, diffuse_init(2)).log_likelihood;
        const double oracle = dense_gaussian_loglik(sys, plan);
        CHECK(std::abs(ll - oracle) <= 1e-8 * std::abs(oracle));
    }
}

TEST_CASE("oracle equivalence across component combinations") {
    RngStream root(2024);
    for (int i = 0; i < 60; ++i) {
        RngStream rng = root.substream(i);
        const int S = (i % 2 == 0) ? 1 : 4;
        const int T = 6 + i % 7;  // 6..12
        const SystemMatrices sys = random_system(rng, S, T);
        std::vector<bool> observed(T, true);
        if (i % 3 == 0) observed[1 + i % (T - 1)] = false;
        const ObservationPlan plan = make_plan(random_series(rng, T), observed);
        const InitialState init = diffuse_init(sys.state_dim());

        const FilterResult filter = kalman_filter(sys, plan, init);
        const double oracle = dense_gaussian_loglik(sys, plan);
        CHECK(std::abs(filter.log_likelihood - oracle) <=
              1e-8 * std::max(1.0, std::abs(oracle)));

        // covariance symmetry along the way
        for (int t = 0; t < T; ++t) {
            const Eigen::MatrixXd& P = filter.filt_cov[t];
            CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("smoother matches dense conditional moments") {
    RngStream rng(99);
    const int T = 6;
    const SystemMatrices sys = random_system(rng, 4, T);
    std::vector<bool> observed(T, true);
    observed[2] = false;
    const ObservationPlan plan = make_plan(random_series(rng, T), observed);
    const InitialState init = diffuse_init(sys.state_dim());

    const FilterResult filter = kalman_filter(sys, plan, init);
    const SmootherResult smooth = kalman_smoother(filter, sys);
    const DenseMoments dense = dense_conditional_moments(sys, plan);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < sys.state_dim(); ++j) {
            CHECK(std::abs(smooth.mean[t](j) - dense.mean[t](j)) <=
                  1e-6 * std::max(1.0, std::abs(dense.mean[t](j))));
            CHECK(std::abs(smooth.cov[t](j, j) - dense.cov[t](j, j)) <=
                  1e-6 * std::max(1.0, dense.cov[t](j, j)));
        }
    }
}

TEST_CASE("smoother boundary and ordering properties") {
    RngStream rng(512);
    const int T = 9;
    const SystemMatrices sys = random_system(rng, 4, T);
    const ObservationPlan plan = make_plan(random_series(rng, T), std::vector<bool>(T, true));
    const InitialState init = diffuse_init(sys.state_dim());
    const FilterResult filter = kalman_filter(sys, plan, init);
    const SmootherResult smooth = kalman_smoother(filter, sys);

    SUBCASE("last-period smoothed moments equal filtered moments") {
        CHECK((smooth.mean[T - 1] - filter.filt_mean[T - 1]).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((smooth.cov[T - 1] - filter.filt_cov[T - 1]).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("smoothed variances never exceed filtered variances") {
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < sys.state_dim(); ++j)
                CHECK(smooth.cov[t](j, j) <= filter.filt_cov[t](j, j) + 1e-10);
    }
    SUBCASE("masking a period inflates its smoothed variance") {
        std::vector<bool> one_missing(T, true);
        one_missing[4] = false;
        Eigen::VectorXd y = plan.value;
        const ObservationPlan masked = make_plan(y, one_missing);
        const SmootherResult smooth_masked =
            kalman_smoother(kalman_filter(sys, masked, init), sys);
        CHECK(smooth_masked.cov[4](0, 0) > smooth.cov[4](0, 0));
    }
}

TEST_CASE("simulation smoother") {
    RngStream rng(77);
    const int T = 6;
    const SystemMatrices sys = random_system(rng, 1, T);
    const ObservationPlan plan = make_plan(random_series(rng, T), std::vector<bool>(T, true));
    const InitialState init = diffuse_init(2);
    const SmootherResult smooth = kalman_smoother(kalman_filter(sys, plan, init), sys);

    SUBCASE("draw moments converge to smoother moments") {
        const int n_draws = 10000;
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(T, 2);
        Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(T, 2);
        RngStream draw_rng(4242);
        for (int d = 0; d < n_draws; ++d) {
            const Eigen::MatrixXd path = simulate_states(sys, plan, init, draw_rng);
            sum += path;
            sum_sq += path.cwiseProduct(path);
        }
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < 2; ++j) {
                const double mean = sum(t, j) / n_draws;
                const double var = sum_sq(t, j) / n_draws - mean * mean;
                const double mcse = std::sqrt(var / n_draws);
                CHECK(std::abs(mean - smooth.mean[t](j)) <= 3.0 * mcse + 1e-12);
                // second moment at the 3-sigma Monte-Carlo band (chi^2 spread)
                const double ref = smooth.cov[t](j, j);
                CHECK(std::abs(var - ref) <= 3.0 * ref * std::sqrt(2.0 / n_draws) + 1e-9);
            }
        }
    }
    SUBCASE("degenerate noise gives near-deterministic paths") {
        const SystemMatrices tiny =
            assemble_system({1, 0}, {1e-12, 0, 0, 0}, Eigen::VectorXd(), Eigen::MatrixXd(T, 0));
        RngStream draw_rng(5);
        Eigen::VectorXd levels(50);
        const ObservationPlan tiny_plan =
            make_plan(Eigen::VectorXd::Constant(T, 1.0), std::vector<bool>(T, true));
        for (int d = 0; d < 50; ++d)
            levels(d) = simulate_states(tiny, tiny_plan, init, draw_rng)(T - 1, 0);
        const double mean = levels.mean();
        CHECK((levels.array() - mean).square().sum() / 49 < 1e-4);
    }
    SUBCASE("fixed seed reproduces the path bit for bit") {
        RngStream a(123), b(123);
        const Eigen::MatrixXd p1 = simulate_states(sys, plan, init, a);
        const Eigen::MatrixXd p2 = simulate_states(sys, plan, init, b);
        CHECK(p1 == p2);
    }
}

TEST_CASE("plan construction rejects empty observation sets") {
    CHECK_THROWS_AS(make_plan(Eigen::VectorXd::Zero(4), std::vector<bool>(4, false)),
                    std::invalid_argument);
}
