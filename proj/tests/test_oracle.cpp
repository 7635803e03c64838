#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "causalts/oracle.hpp"

using namespace causalts;

TEST_CASE("synthetic generator records the injected truth") {
    ScenarioSpec spec;
    spec.num_periods = 64;
    spec.t_star = 46;

    SUBCASE("no effect") {
        RngStream rng(1);
        const SyntheticData data = generate_synthetic(spec, rng);
        CHECK(data.true_pointwise.isZero());
        CHECK(data.true_cumulative.isZero());
        CHECK(data.outcome.length() == 64);
    }
    SUBCASE("step effect of 100 over 19 post periods accumulates to 1900") {
        spec.effect = EffectShape::step;
        spec.effect_size = 100.0;
        RngStream rng(1);
        const SyntheticData data = generate_synthetic(spec, rng);
        CHECK(data.true_pointwise.size() == 19);
        CHECK((data.true_pointwise.array() == 100.0).all());
        CHECK(data.true_cumulative(18) == doctest::Approx(1900.0));
    }
    SUBCASE("ramp effect grows linearly") {
        spec.effect = EffectShape::ramp;
        spec.effect_size = 10.0;
        RngStream rng(1);
        const SyntheticData data = generate_synthetic(spec, rng);
        CHECK(data.true_pointwise(0) == 10.0);
        CHECK(data.true_pointwise(18) == 190.0);
    }
    SUBCASE("the injected step moves the observed post-period") {
        RngStream rng_a(9), rng_b(9);
        const SyntheticData null_data = generate_synthetic(spec, rng_a);
        spec.effect = EffectShape::step;
        spec.effect_size = 100.0;
        const SyntheticData step_data = generate_synthetic(spec, rng_b);
        CHECK(null_data.outcome.values.head(45) == step_data.outcome.values.head(45));
        CHECK((step_data.outcome.values.tail(19) - null_data.outcome.values.tail(19) -
               Eigen::VectorXd::Constant(19, 100.0))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
}

TEST_CASE("seasonal generator leaves a lag-S signature") {
    ScenarioSpec spec;
    spec.num_periods = 64;
    spec.t_star = 60;
    spec.seasons = 4;
    spec.variances = {4.0, 1.0, 0.01, 400.0};  // strong seasonal component

    auto autocorr = [](const Eigen::VectorXd& y, int lag) {
        // detrend by first differences to isolate the cyclic part
        Eigen::VectorXd d(y.size() - 1);
        for (int t = 0; t + 1 < y.size(); ++t) d(t) = y(t + 1) - y(t);
        const double mean = d.mean();
        double num = 0.0, den = 0.0;
        for (int t = 0; t + lag < d.size(); ++t)
            num += (d(t) - mean) * (d(t + lag) - mean);
        for (int t = 0; t < d.size(); ++t) den += (d(t) - mean) * (d(t) - mean);
        return num / den;
    };

    RngStream root(33);
    double mean_lag4 = 0.0, mean_lag3 = 0.0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        RngStream rng = root.substream(r);
        const SyntheticData data = generate_synthetic(spec, rng);
        mean_lag4 += autocorr(data.outcome.values, 4);
        mean_lag3 += autocorr(data.outcome.values, 3);
    }
    CHECK(mean_lag4 / reps > mean_lag3 / reps);
}

TEST_CASE("dense oracle closed forms and guards") {
    SUBCASE("single observation reduces to a scalar normal density") {
        const SystemMatrices sys = assemble_system({1, 0}, {0.3, 0.1, 0.05, 0.0},
                                                   Eigen::VectorXd(), Eigen::MatrixXd(1, 0));
        Eigen::VectorXd y(1);
        y << 1.7;
        const ObservationPlan plan = make_plan(y, {true});
        const double kappa = 1e6;
        const double var = kappa + sys.obs_var;  // Z P1 Z' + H
        const double expected =
            -0.5 * (std::log(2.0 * std::numbers::pi * var) + y(0) * y(0) / var);
        CHECK(dense_gaussian_loglik(sys, plan, kappa) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("all-missing plans are rejected") {
        const SystemMatrices sys = assemble_system({1, 0}, {0.3, 0.1, 0.05, 0.0},
                                                   Eigen::VectorXd(), Eigen::MatrixXd(3, 0));
        CHECK_THROWS_AS(make_plan(Eigen::VectorXd::Zero(3), std::vector<bool>(3, false)),
                        std::invalid_argument);
    }
    SUBCASE("size cap") {
        const SystemMatrices sys = assemble_system({1, 0}, {0.3, 0.1, 0.05, 0.0},
                                                   Eigen::VectorXd(), Eigen::MatrixXd(13, 0));
        const ObservationPlan plan =
            make_plan(Eigen::VectorXd::Zero(13), std::vector<bool>(13, true));
        CHECK_THROWS_AS(dense_gaussian_loglik(sys, plan), std::invalid_argument);
    }
    SUBCASE("conditional moments with one observation, T=1") {
        const SystemMatrices sys = assemble_system({1, 0}, {0.5, 0.1, 0.05, 0.0},
                                                   Eigen::VectorXd(), Eigen::MatrixXd(1, 0));
        Eigen::VectorXd y(1);
        y << 2.0;
        const double kappa = 1e6;
        const DenseMoments m = dense_conditional_moments(sys, make_plan(y, {true}), kappa);
        // E[level | y] = kappa/(kappa+H) * y
        CHECK(m.mean[0](0) == doctest::Approx(kappa / (kappa + sys.obs_var) * 2.0));
        CHECK(m.cov[0](0, 0) ==
              doctest::Approx(kappa - kappa * kappa / (kappa + sys.obs_var)).epsilon(1e-6));
    }
}

TEST_CASE("verification sweep passes at its stated tolerances") {
    const VerificationReport report = run_verification(60, 2026);
    CHECK(report.loglik_ok);
    CHECK(report.smoother_ok);
}

TEST_CASE("coverage experiment is deterministic and schedule-independent") {
    ScenarioSpec spec;
    spec.num_periods = 24;
    spec.t_star = 21;
    spec.seasons = 1;
    spec.replications = 6;
    spec.seed = 5;
    AnalysisConfig config;
    config.seasons = 1;
    config.mcmc.burn_in = 50;
    config.mcmc.kept = 100;

    const CoverageResult serial = coverage_experiment(spec, config, /*parallel=*/false);
    const CoverageResult parallel = coverage_experiment(spec, config, /*parallel=*/true);
    const CoverageResult repeat = coverage_experiment(spec, config, /*parallel=*/true);
    CHECK(serial.coverage == parallel.coverage);
    CHECK(serial.mean_estimate == parallel.mean_estimate);
    CHECK(serial.significant_rate == parallel.significant_rate);
    CHECK(parallel.mean_estimate == repeat.mean_estimate);
    CHECK(serial.replications == 6);
}
