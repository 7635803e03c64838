#include "causalts/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace causalts {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim whitespace and surrounding quotes
        auto begin = field.find_first_not_of(" \t\r\"");
        auto end = field.find_last_not_of(" \t\r\"");
        out.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& text, const std::string& context) {
    if (text.empty()) throw std::invalid_argument("missing cell in " + context);
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("unparseable number '" + text + "' in " + context);
    }
    if (pos != text.size())
        throw std::invalid_argument("unparseable number '" + text + "' in " + context);
    return value;
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& csv_path, const RunOptions& options) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open data file " + csv_path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty data file");
    const std::vector<std::string> header = split_csv_line(line);

    int period_col = -1, outcome_col = -1;
    std::vector<int> covariate_cols;
    std::vector<std::string> covariate_names;
    for (int j = 0; j < static_cast<int>(header.size()); ++j) {
        const std::string& name = header[j];
        if (name == "period") period_col = j;
        else if (name == options.outcome_column) outcome_col = j;
        else if (std::find(options.ignore_columns.begin(), options.ignore_columns.end(), name) !=
                 options.ignore_columns.end())
            continue;
        else {
            covariate_cols.push_back(j);
            covariate_names.push_back(name);
        }
    }
    if (period_col < 0) throw std::invalid_argument("data file has no 'period' column");
    if (outcome_col < 0)
        throw std::invalid_argument("data file has no '" + options.outcome_column + "' column");

    std::vector<std::string> period_text;
    std::vector<double> outcome_values;
    std::vector<std::vector<double>> covariate_rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("row " + std::to_string(line_no) +
                                        " has wrong field count");
        const std::string ctx = "row " + std::to_string(line_no);
        period_text.push_back(cells[period_col]);
        outcome_values.push_back(parse_double(cells[outcome_col], ctx));
        std::vector<double> row;
        for (int j : covariate_cols) row.push_back(parse_double(cells[j], ctx));
        covariate_rows.push_back(std::move(row));
    }
    const int T = static_cast<int>(outcome_values.size());
    if (T == 0) throw std::invalid_argument("data file has no rows");

    LoadedDataset out;
    out.outcome.values = Eigen::Map<Eigen::VectorXd>(outcome_values.data(), T);

    // Period index: all quarterly labels, or all integer ordinals starting at 1.
    const std::optional<PeriodLabel> first_label = parse_period_label(period_text[0]);
    if (first_label) {
        out.outcome.labels.resize(T);
        for (int t = 0; t < T; ++t) {
            const auto label = parse_period_label(period_text[t]);
            if (!label)
                throw std::invalid_argument("unparseable period '" + period_text[t] + "'");
            out.outcome.labels[t] = *label;
            if (t > 0 && !(*label == next_quarter(out.outcome.labels[t - 1])))
                throw std::invalid_argument("periods not contiguous at '" + period_text[t] + "'");
        }
    } else {
        for (int t = 0; t < T; ++t) {
            char* end = nullptr;
            const long ord = std::strtol(period_text[t].c_str(), &end, 10);
            if (end == period_text[t].c_str() || *end != '\0')
                throw std::invalid_argument("unparseable period '" + period_text[t] + "'");
            if (ord != t + 1)
                throw std::invalid_argument("ordinal periods must be contiguous from 1; got '" +
                                            period_text[t] + "'");
        }
    }

    if (!covariate_cols.empty()) {
        CovariateSet cov;
        cov.values.resize(T, static_cast<int>(covariate_cols.size()));
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < static_cast<int>(covariate_cols.size()); ++j)
                cov.values(t, j) = covariate_rows[t][j];
        cov.names = covariate_names;
        out.covariates = std::move(cov);
    }

    // Intervention: match against labels first, then accept an ordinal.
    if (options.intervention.empty())
        throw std::invalid_argument("config must name the intervention period");
    int t_star = -1;
    if (const auto label = parse_period_label(options.intervention)) {
        for (int t = 0; t < T; ++t) {
            if (!out.outcome.labels.empty() && out.outcome.labels[t] == *label) {
                t_star = t + 1;
                break;
            }
        }
        if (t_star < 0)
            throw std::invalid_argument("intervention period '" + options.intervention +
                                        "' is not in the series index");
    } else {
        char* end = nullptr;
        const long ord = std::strtol(options.intervention.c_str(), &end, 10);
        if (end == options.intervention.c_str() || *end != '\0')
            throw std::invalid_argument("unparseable intervention period '" +
                                        options.intervention + "'");
        if (ord < 1 || ord > T)
            throw std::invalid_argument("intervention ordinal out of range");
        t_star = static_cast<int>(ord);
    }
    out.intervention = {t_star};
    return out;
}

RunOptions load_config(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("invalid config: ") + e.what());
    }

    RunOptions options;
    if (j.contains("intervention")) {
        if (j["intervention"].is_string()) options.intervention = j["intervention"];
        else options.intervention = std::to_string(j["intervention"].get<long>());
    }
    options.analysis.seasons = j.value("seasons", 4);
    options.analysis.credible_level = j.value("credible_level", 0.95);
    if (j.contains("alpha"))
        options.analysis.credible_level = 1.0 - j["alpha"].get<double>();
    if (j.contains("mcmc")) {
        const auto& m = j["mcmc"];
        options.analysis.mcmc.burn_in = m.value("burn_in", options.analysis.mcmc.burn_in);
        options.analysis.mcmc.kept = m.value("kept", options.analysis.mcmc.kept);
        options.analysis.mcmc.thin = m.value("thin", options.analysis.mcmc.thin);
        options.analysis.mcmc.chains = m.value("chains", options.analysis.mcmc.chains);
        options.analysis.mcmc.seed = m.value("seed", options.analysis.mcmc.seed);
    }
    if (j.contains("priors")) {
        const auto& pr = j["priors"];
        auto read_ig = [&](const char* key, InverseGammaPrior& p) {
            if (!pr.contains(key)) return;
            p.nu = pr[key].value("nu", p.nu);
            p.s = pr[key].value("s", p.s);
        };
        read_ig("obs", options.analysis.priors.obs);
        read_ig("level", options.analysis.priors.level);
        read_ig("slope", options.analysis.priors.slope);
        read_ig("seasonal", options.analysis.priors.seasonal);
        options.analysis.priors.beta_sd = pr.value("beta_sd", options.analysis.priors.beta_sd);
    }
    if (j.contains("ignore"))
        options.ignore_columns = j["ignore"].get<std::vector<std::string>>();
    options.outcome_column = j.value("outcome_column", options.outcome_column);
    return options;
}

AnalysisResult run_analysis(const LoadedDataset& loaded, const AnalysisConfig& config) {
    ValidatedDataset dataset =
        validate_dataset(loaded.outcome, loaded.covariates, loaded.intervention, config);
    PosteriorDraws draws = run_gibbs(dataset);
    RngStream pred_rng = RngStream(config.mcmc.seed).substream(0xC0FFEE);
    const CounterfactualDraws cf = predict_counterfactual(draws, dataset, pred_rng);
    EffectSummary summary = summarize_impact(loaded.outcome, cf, loaded.intervention,
                                             1.0 - config.credible_level);
    ChainDiagnostics diagnostics = compute_diagnostics(draws);
    return {std::move(dataset), std::move(draws), std::move(summary), std::move(diagnostics)};
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

std::string with_thousands(long long v) {
    const bool negative = v < 0;
    std::string digits = std::to_string(negative ? -v : v);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count > 0 && count % 3 == 0) out.push_back(',');
        out.push_back(*it);
        ++count;
    }
    if (negative) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

std::string rounded(double x) {
    return with_thousands(static_cast<long long>(std::llround(x)));
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string period_name(const OutcomeSeries& series, int t /*0-based*/) {
    if (!series.labels.empty()) return format_period(series.labels[t]);
    return std::to_string(t + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_effect_row(const IntervalSummary& interval) {
    return rounded(interval.mean) + " (" + rounded(interval.lower) + " to " +
           rounded(interval.upper) + ")";
}

std::string format_tail_probability(double p) {
    if (p > 0.999) return ">99.9%";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f%%", p * 100.0);
    return buf;
}

RunManifest make_manifest(const std::filesystem::path& data_path,
                          const std::filesystem::path& config_path, std::uint64_t seed) {
    RunManifest manifest;
    manifest.data_path = data_path.string();
    manifest.config_path = config_path.string();
    manifest.seed = seed;
    manifest.version = kLibraryVersion;

    std::ifstream in(config_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf.str())));
    manifest.config_digest = digest;

    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    manifest.timestamp = stamp;
    return manifest;
}

void emit_report(const AnalysisResult& result, const RunManifest& manifest,
                 const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const EffectSummary& s = result.summary;
    const OutcomeSeries& observed = result.dataset.outcome;

    {
        nlohmann::json j;
        j["t_star"] = s.t_star;
        j["alpha"] = s.alpha;
        j["tail_probability"] = s.tail_prob;
        j["significant"] = s.significant;
        const IntervalSummary& horizon = s.cumulative_at_horizon();
        j["cumulative_effect"] = {
            {"mean", horizon.mean}, {"lower", horizon.lower}, {"upper", horizon.upper}};
        nlohmann::json pointwise = nlohmann::json::array();
        for (int k = 0; k < static_cast<int>(s.pointwise_post.size()); ++k) {
            pointwise.push_back({{"k", k + 1},
                                 {"mean", s.pointwise_post[k].mean},
                                 {"lower", s.pointwise_post[k].lower},
                                 {"upper", s.pointwise_post[k].upper}});
        }
        j["pointwise_effects"] = std::move(pointwise);
        nlohmann::json cumulative = nlohmann::json::array();
        for (int k = 0; k < static_cast<int>(s.cumulative_post.size()); ++k) {
            cumulative.push_back({{"K", k + 1},
                                  {"mean", s.cumulative_post[k].mean},
                                  {"lower", s.cumulative_post[k].lower},
                                  {"upper", s.cumulative_post[k].upper}});
        }
        j["cumulative_effects"] = std::move(cumulative);
        nlohmann::json diag = nlohmann::json::array();
        for (int i = 0; i < static_cast<int>(result.diagnostics.names.size()); ++i) {
            diag.push_back({{"parameter", result.diagnostics.names[i]},
                            {"ess", result.diagnostics.ess[i]},
                            {"rhat", result.diagnostics.rhat[i]}});
        }
        j["diagnostics"] = std::move(diag);
        auto out = open_out(out_dir / "summary.json");
        out << j.dump(2) << "\n";
    }

    {
        auto out = open_out(out_dir / "table_effects.csv");
        out << "quantity,estimate\n";
        out << "cumulative effect,\"" << format_effect_row(s.cumulative_at_horizon()) << "\"\n";
        const int K = static_cast<int>(s.pointwise_post.size());
        out << "final pointwise effect,\"" << format_effect_row(s.pointwise_post[K - 1])
            << "\"\n";
    }
    {
        auto out = open_out(out_dir / "table_probabilities.csv");
        out << "quantity,posterior probability\n";
        out << "causal effect present," << format_tail_probability(s.tail_prob) << "\n";
    }
    {
        auto out = open_out(out_dir / "manifest.json");
        nlohmann::json j;
        j["data_path"] = manifest.data_path;
        j["config_path"] = manifest.config_path;
        j["config_digest"] = manifest.config_digest;
        j["seed"] = manifest.seed;
        j["version"] = manifest.version;
        j["timestamp"] = manifest.timestamp;
        out << j.dump(2) << "\n";
    }
    emit_plot_data(s, observed, out_dir);
}

void emit_plot_data(const EffectSummary& summary, const OutcomeSeries& observed,
                    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const int T = summary.num_periods();
    {
        auto out = open_out(out_dir / "panel_original.csv");
        out << "period,observed,counterfactual_mean,lower,upper\n";
        for (int t = 0; t < T; ++t) {
            const IntervalSummary& c = summary.counterfactual[t];
            out << period_name(observed, t) << ',' << format_number(observed.values(t)) << ','
                << format_number(c.mean) << ',' << format_number(c.lower) << ','
                << format_number(c.upper) << "\n";
        }
    }
    {
        auto out = open_out(out_dir / "panel_pointwise.csv");
        out << "period,effect_mean,lower,upper\n";
        for (int t = 0; t < T; ++t) {
            const IntervalSummary& c = summary.pointwise[t];
            out << period_name(observed, t) << ',' << format_number(c.mean) << ','
                << format_number(c.lower) << ',' << format_number(c.upper) << "\n";
        }
    }
    {
        auto out = open_out(out_dir / "panel_cumulative.csv");
        out << "period,cumulative_mean,lower,upper\n";
        for (int t = 0; t < T; ++t) {
            const IntervalSummary& c = summary.cumulative[t];
            out << period_name(observed, t) << ',' << format_number(c.mean) << ','
                << format_number(c.lower) << ',' << format_number(c.upper) << "\n";
        }
    }
}

}  // namespace causalts
