#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "causalts/impact.hpp"
#include "causalts/sampler.hpp"
#include "causalts/series.hpp"

namespace causalts {

// Run-time options parsed from the config file. The intervention is given
// either as a period label ("2010Q2") or a 1-based ordinal.
struct RunOptions {
    std::string intervention;               // label or ordinal as text
    AnalysisConfig analysis;
    std::vector<std::string> ignore_columns;
    std::string outcome_column = "outcome";
};

struct LoadedDataset {
    OutcomeSeries outcome;
    std::optional<CovariateSet> covariates;
    InterventionSpec intervention;
};

LoadedDataset load_dataset(const std::filesystem::path& csv_path, const RunOptions& options);

RunOptions load_config(const std::filesystem::path& config_path);

struct AnalysisResult {
    ValidatedDataset dataset;
    PosteriorDraws draws;
    EffectSummary summary;
    ChainDiagnostics diagnostics;
};

AnalysisResult run_analysis(const LoadedDataset& loaded, const AnalysisConfig& config);

struct RunManifest {
    std::string data_path;
    std::string config_path;
    std::string config_digest;  // stable under re-serialization
    std::uint64_t seed = 0;
    std::string version;
    std::string timestamp;      // honours SOURCE_DATE_EPOCH for reproducible runs
};

RunManifest make_manifest(const std::filesystem::path& data_path,
                          const std::filesystem::path& config_path, std::uint64_t seed);

void emit_report(const AnalysisResult& result, const RunManifest& manifest,
                 const std::filesystem::path& out_dir);
void emit_plot_data(const EffectSummary& summary, const OutcomeSeries& observed,
                    const std::filesystem::path& out_dir);

// Presentation helpers shared by reports and tests.
std::string format_effect_row(const IntervalSummary& interval);   // "-113,070 (-185,834 to -34,648)"
std::string format_tail_probability(double p);                    // "98.7%", ">99.9%" when saturated
std::string format_number(double x);                              // stable numeric CSV formatting

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace causalts
