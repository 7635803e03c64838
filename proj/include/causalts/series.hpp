#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causalts/priors.hpp"

namespace causalts {

// Calendar quarter label, e.g. 2010Q2.
struct PeriodLabel {
    int year;
    int quarter;  // 1..4
    bool operator==(const PeriodLabel&) const = default;
};

std::string format_period(const PeriodLabel& p);
std::optional<PeriodLabel> parse_period_label(const std::string& text);
PeriodLabel next_quarter(PeriodLabel p);

// Single observed outcome series. Labels, when present, must be contiguous
// quarters with one label per value.
struct OutcomeSeries {
    Eigen::VectorXd values;
    std::vector<PeriodLabel> labels;  // empty when the index is ordinal-only

    int length() const { return static_cast<int>(values.size()); }
};

struct CovariateSet {
    Eigen::MatrixXd values;  // T x p
    std::vector<std::string> names;
    // Pre-period standardization statistics, filled during validation.
    Eigen::VectorXd pre_mean;
    Eigen::VectorXd pre_sd;

    int count() const { return static_cast<int>(values.cols()); }
};

// First treated period t*, 1-based; periods 1..t*-1 are pre-intervention.
struct InterventionSpec {
    int t_star;
};

struct McmcSettings {
    int burn_in = 1000;
    int kept = 4000;
    int thin = 1;
    int chains = 1;
    std::uint64_t seed = 20100331;
};

struct AnalysisConfig {
    int seasons = 4;              // 1 disables seasonality
    double credible_level = 0.95; // 1 - alpha
    McmcSettings mcmc;
    Priors priors;
};

struct Standardization {
    double mean = 0.0;
    double sd = 1.0;

    double apply(double x) const { return (x - mean) / sd; }
    double invert(double z) const { return z * sd + mean; }
};

// Everything downstream of validation: immutable, invariants guaranteed,
// outcome and covariates standardized by pre-period statistics.
struct ValidatedDataset {
    OutcomeSeries outcome;
    std::optional<CovariateSet> covariates;
    InterventionSpec intervention;
    AnalysisConfig config;
    Standardization outcome_scale;
    Eigen::VectorXd outcome_std;     // T
    Eigen::MatrixXd covariates_std;  // T x p (p = 0 when no covariates)

    int length() const { return static_cast<int>(outcome.values.size()); }
    int t_star() const { return intervention.t_star; }
    int pre_length() const { return intervention.t_star - 1; }
    int post_length() const { return length() - intervention.t_star + 1; }
    int covariate_count() const { return static_cast<int>(covariates_std.cols()); }
};

ValidatedDataset validate_dataset(const OutcomeSeries& outcome,
                                  const std::optional<CovariateSet>& covariates,
                                  const InterventionSpec& intervention,
                                  const AnalysisConfig& config);

// 1-based inclusive period ranges.
struct PeriodSplit {
    int pre_begin;
    int pre_end;
    int post_begin;
    int post_end;
};

// Re-validating an already validated dataset returns an identical dataset.
ValidatedDataset validate_dataset(const ValidatedDataset& dataset);

PeriodSplit split_periods(const ValidatedDataset& dataset);

int minimum_pre_length(int seasons);

}  // namespace causalts
