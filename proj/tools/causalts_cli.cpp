#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "causalts/io.hpp"
#include "causalts/oracle.hpp"

namespace fs = std::filesystem;
using namespace causalts;

namespace {

int cmd_run(const std::string& data_path, const std::string& config_path,
            const std::string& out_dir, std::optional<std::uint64_t> seed_override) {
    RunOptions options = load_config(config_path);
    if (seed_override) options.analysis.mcmc.seed = *seed_override;
    const LoadedDataset loaded = load_dataset(data_path, options);
    const AnalysisResult result = run_analysis(loaded, options.analysis);
    const RunManifest manifest =
        make_manifest(data_path, config_path, options.analysis.mcmc.seed);
    emit_report(result, manifest, out_dir);

    const IntervalSummary& horizon = result.summary.cumulative_at_horizon();
    std::cout << "cumulative effect: " << format_effect_row(horizon) << "\n"
              << "posterior probability of a causal effect: "
              << format_tail_probability(result.summary.tail_prob) << "\n"
              << "significant at level " << result.summary.alpha << ": "
              << (result.summary.significant ? "yes" : "no") << "\n"
              << "outputs written to " << out_dir << "\n";
    return 0;
}

ScenarioSpec scenario_from_flags(int T, int t_star, int seasons, int covariates,
                                 const std::string& effect, double effect_size,
                                 int replications, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.num_periods = T;
    spec.t_star = t_star;
    spec.seasons = seasons;
    spec.num_covariates = covariates;
    spec.beta = Eigen::VectorXd::Constant(covariates, 15.0);
    spec.replications = replications;
    spec.seed = seed;
    spec.effect_size = effect_size;
    if (effect == "none") spec.effect = EffectShape::none;
    else if (effect == "step") spec.effect = EffectShape::step;
    else if (effect == "ramp") spec.effect = EffectShape::ramp;
    else throw CLI::ValidationError("--effect must be none, step, or ramp");
    return spec;
}

int cmd_simulate(const ScenarioSpec& spec, const std::string& out_path) {
    RngStream rng(spec.seed);
    const SyntheticData data = generate_synthetic(spec, rng);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    out << "period,outcome";
    const int p = data.covariates ? data.covariates->count() : 0;
    for (int j = 0; j < p; ++j) out << ',' << data.covariates->names[j];
    out << "\n";
    for (int t = 0; t < data.outcome.length(); ++t) {
        out << (t + 1) << ',' << format_number(data.outcome.values(t));
        for (int j = 0; j < p; ++j)
            out << ',' << format_number(data.covariates->values(t, j));
        out << "\n";
    }
    std::cout << "wrote " << data.outcome.length() << " periods to " << out_path
              << " (t*=" << spec.t_star << ", true cumulative effect "
              << format_number(data.true_cumulative.tail(1)(0)) << ")\n";
    return 0;
}

int cmd_verify(int systems, std::uint64_t seed) {
    const VerificationReport report = run_verification(systems, seed);
    std::printf("systems checked:        %d\n", report.systems);
    std::printf("max loglik rel err:     %.3e  (tolerance 1e-8)  %s\n",
                report.max_loglik_rel_err, report.loglik_ok ? "PASS" : "FAIL");
    std::printf("max smoother mean err:  %.3e  (tolerance 1e-6)  %s\n",
                report.max_smoother_mean_err, report.smoother_ok ? "PASS" : "FAIL");
    std::printf("max smoother var err:   %.3e\n", report.max_smoother_cov_err);
    std::printf("elapsed:                %.2f s\n", report.seconds);
    return (report.loglik_ok && report.smoother_ok) ? 0 : 1;
}

int cmd_coverage(const ScenarioSpec& spec, const AnalysisConfig& config, bool serial,
                 const std::string& out_path) {
    const CoverageResult result = coverage_experiment(spec, config, !serial);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    out << "replications,true_cumulative,coverage,mean_estimate,mean_bias,significant_rate\n";
    out << result.replications << ',' << format_number(result.true_cumulative) << ','
        << format_number(result.coverage) << ',' << format_number(result.mean_estimate) << ','
        << format_number(result.mean_bias) << ',' << format_number(result.significant_rate)
        << "\n";
    std::printf("replications:      %d\n", result.replications);
    std::printf("true cumulative:   %.2f\n", result.true_cumulative);
    std::printf("interval coverage: %.3f\n", result.coverage);
    std::printf("mean bias:         %.2f\n", result.mean_bias);
    std::printf("significant rate:  %.3f\n", result.significant_rate);
    std::printf("elapsed:           %.1f s\n", result.seconds);
    std::printf("table written to %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal effect estimation for a single intervened time-series"};
    app.require_subcommand(1);

    // run
    std::string data_path, config_path, out_dir = "out";
    std::uint64_t seed_flag = 0;
    bool seed_set = false;
    auto* run = app.add_subcommand("run", "fit the model and emit effect reports");
    run->add_option("--data", data_path, "input CSV")->required();
    run->add_option("--config", config_path, "config JSON")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_flag, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });

    // shared scenario flags
    int T = 64, t_star = 46, seasons = 4, covariates = 0, replications = 200;
    std::uint64_t seed = 1;
    std::string effect = "none", out_path = "scenario.csv";
    double effect_size = 0.0;
    auto add_scenario_flags = [&](CLI::App* cmd) {
        cmd->add_option("--periods", T, "series length T");
        cmd->add_option("--t-star", t_star, "first treated period");
        cmd->add_option("--seasons", seasons, "seasons per cycle");
        cmd->add_option("--covariates", covariates, "number of synthetic covariates");
        cmd->add_option("--effect", effect, "none|step|ramp");
        cmd->add_option("--effect-size", effect_size, "per-period effect size");
        cmd->add_option("--seed", seed, "RNG seed");
    };

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario CSV");
    add_scenario_flags(simulate);
    simulate->add_option("--out", out_path, "output CSV path");

    int systems = 200;
    auto* verify = app.add_subcommand("verify", "filter/smoother vs dense-oracle sweep");
    verify->add_option("--systems", systems, "number of random systems");
    verify->add_option("--seed", seed, "RNG seed");

    auto* coverage = app.add_subcommand("coverage", "calibration experiment");
    add_scenario_flags(coverage);
    coverage->add_option("--replications", replications, "replication count");
    int burn_in = 500, kept = 1500;
    coverage->add_option("--burn-in", burn_in, "MCMC burn-in per replication");
    coverage->add_option("--kept", kept, "kept MCMC draws per replication");
    bool serial = false;
    coverage->add_flag("--serial", serial, "use the serial reference path");
    std::string coverage_out = "coverage.csv";
    coverage->add_option("--out", coverage_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(data_path, config_path, out_dir,
                           seed_set ? std::optional<std::uint64_t>(seed_flag) : std::nullopt);
        if (simulate->parsed())
            return cmd_simulate(
                scenario_from_flags(T, t_star, seasons, covariates, effect, effect_size, 1,
                                    seed),
                out_path);
        if (verify->parsed()) return cmd_verify(systems, seed);
        if (coverage->parsed()) {
            const ScenarioSpec spec =
                scenario_from_flags(T, t_star, seasons, covariates, effect, effect_size,
                                    replications, seed);
            AnalysisConfig config;
            config.seasons = seasons;
            config.mcmc.burn_in = burn_in;
            config.mcmc.kept = kept;
            return cmd_coverage(spec, config, serial, coverage_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
