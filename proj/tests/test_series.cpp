#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "causalts/series.hpp"

using namespace causalts;

namespace {

OutcomeSeries make_outcome(int T, double base = 100.0) {
    OutcomeSeries s;
    s.values = Eigen::VectorXd::LinSpaced(T, base, base + T - 1);
    return s;
}

AnalysisConfig config_with(int seasons) {
    AnalysisConfig c;
    c.seasons = seasons;
    return c;
}

}  // namespace

TEST_CASE("HRRP-shaped dataset validates") {
    OutcomeSeries outcome = make_outcome(64, 1000.0);
    outcome.labels.resize(64);
    PeriodLabel label{1999, 1};
    for (int t = 0; t < 64; ++t) {
        outcome.labels[t] = label;
        label = next_quarter(label);
    }
    const ValidatedDataset d =
        validate_dataset(outcome, std::nullopt, {46}, config_with(4));
    CHECK(d.pre_length() == 45);
    CHECK(d.post_length() == 19);
    CHECK(d.outcome.labels[45] == PeriodLabel{2010, 2});
}

TEST_CASE("boundary: one-period post window") {
    const ValidatedDataset d =
        validate_dataset(make_outcome(10), std::nullopt, {10}, config_with(1));
    CHECK(d.post_length() == 1);
    const PeriodSplit split = split_periods(d);
    CHECK(split.pre_end == 9);
    CHECK(split.post_begin == 10);
    CHECK(split.post_end == 10);
}

TEST_CASE("validation errors") {
    AnalysisConfig cfg = config_with(1);

    SUBCASE("pre-period too short") {
        CHECK_THROWS_WITH_AS(validate_dataset(make_outcome(10), std::nullopt, {2}, cfg),
                             doctest::Contains("pre-period"), std::invalid_argument);
    }
    SUBCASE("t_star out of range") {
        CHECK_THROWS_AS(validate_dataset(make_outcome(10), std::nullopt, {11}, cfg),
                        std::invalid_argument);
        CHECK_THROWS_AS(validate_dataset(make_outcome(10), std::nullopt, {1}, cfg),
                        std::invalid_argument);
    }
    SUBCASE("constant covariate") {
        CovariateSet cov;
        cov.values = Eigen::MatrixXd::Ones(10, 1);
        cov.names = {"flat"};
        CHECK_THROWS_WITH_AS(validate_dataset(make_outcome(10), cov, {10}, cfg),
                             doctest::Contains("constant covariate"), std::invalid_argument);
    }
    SUBCASE("covariate length mismatch") {
        CovariateSet cov;
        cov.values = Eigen::MatrixXd::Random(9, 1);
        cov.names = {"x"};
        CHECK_THROWS_AS(validate_dataset(make_outcome(10), cov, {10}, cfg),
                        std::invalid_argument);
    }
    SUBCASE("seasons not below pre-period") {
        cfg.seasons = 9;
        CHECK_THROWS_AS(validate_dataset(make_outcome(30), std::nullopt, {10}, cfg),
                        std::invalid_argument);
    }
    SUBCASE("kept draws floor") {
        cfg.mcmc.kept = 50;
        CHECK_THROWS_AS(validate_dataset(make_outcome(10), std::nullopt, {10}, cfg),
                        std::invalid_argument);
    }
    SUBCASE("non-contiguous labels") {
        OutcomeSeries outcome = make_outcome(10);
        outcome.labels.resize(10);
        PeriodLabel label{2001, 1};
        for (int t = 0; t < 10; ++t) {
            outcome.labels[t] = label;
            label = next_quarter(label);
        }
        outcome.labels[5] = {2003, 1};
        CHECK_THROWS_AS(validate_dataset(outcome, std::nullopt, {10}, cfg),
                        std::invalid_argument);
    }
}

TEST_CASE("partition property for all valid t_star") {
    for (int t_star = 9; t_star <= 20; ++t_star) {
        const ValidatedDataset d =
            validate_dataset(make_outcome(20), std::nullopt, {t_star}, config_with(1));
        const PeriodSplit split = split_periods(d);
        CHECK(split.pre_begin == 1);
        CHECK(split.pre_end + 1 == split.post_begin);
        CHECK(split.post_end == 20);
        CHECK((split.pre_end - split.pre_begin + 1) + (split.post_end - split.post_begin + 1) ==
              20);
    }
}

TEST_CASE("standardization round-trip") {
    OutcomeSeries outcome = make_outcome(16, 5000.0);
    for (int t = 0; t < 16; ++t) outcome.values(t) += 37.5 * ((t * 13) % 7);
    const ValidatedDataset d =
        validate_dataset(outcome, std::nullopt, {12}, config_with(1));
    for (int t = 0; t < 16; ++t) {
        const double back = d.outcome_scale.invert(d.outcome_std(t));
        CHECK(std::abs(back - outcome.values(t)) <=
              1e-12 * std::max(1.0, std::abs(outcome.values(t))));
    }
}

TEST_CASE("validation is idempotent") {
    CovariateSet cov;
    cov.values = Eigen::MatrixXd::Random(20, 2);
    cov.names = {"a", "b"};
    const ValidatedDataset first =
        validate_dataset(make_outcome(20), cov, {15}, config_with(4));
    const ValidatedDataset second = validate_dataset(first);
    CHECK(first.outcome_std == second.outcome_std);
    CHECK(first.covariates_std == second.covariates_std);
    CHECK(first.outcome_scale.mean == second.outcome_scale.mean);
    CHECK(first.outcome_scale.sd == second.outcome_scale.sd);
    CHECK(first.covariates->pre_mean == second.covariates->pre_mean);
}

TEST_CASE("period label parsing") {
    CHECK(parse_period_label("2010Q2") == PeriodLabel{2010, 2});
    CHECK(parse_period_label("1999Q1") == PeriodLabel{1999, 1});
    CHECK(!parse_period_label("2010Q5"));
    CHECK(!parse_period_label("2010"));
    CHECK(!parse_period_label("2010Q2x"));
    CHECK(format_period({2014, 4}) == "2014Q4");
    CHECK(next_quarter({2009, 4}) == PeriodLabel{2010, 1});
}
