#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wam/errors.hpp"
#include "wam/inference.hpp"
#include "wam/rates.hpp"
#include "wam/report.hpp"
#include "wam/wam.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct AuditConfig {
    std::string data_path;
    std::string outcome_col;
    std::string sensitive;           // comma-separable
    std::string features;            // optional include list
    std::string exclude;             // optional exclude list
    std::string model = "linear";
    int knn_k = 10;
    int bins = 0;
    int boot_resamples = 0;
    std::uint64_t seed = 0;
    std::string rate = "none";
    double threshold = 0.5;
    std::size_t min_group_size = 20;
    double ridge = 0.0;
    std::string format = "table";
    std::string output_path;
    std::string separator = ",";
};

int run_audit(const AuditConfig& cfg) {
    auto sensitive_cols = split_list(cfg.sensitive);
    auto include = split_list(cfg.features);
    auto exclude = split_list(cfg.exclude);
    if (sensitive_cols.empty()) throw wam::ConfigError("--s requires at least one column");
    for (const auto& s : sensitive_cols)
        if (s == cfg.outcome_col)
            throw wam::ConfigError("outcome column may not be sensitive: " + s);
    if (cfg.separator.size() != 1) throw wam::ConfigError("--sep must be a single character");
    if (cfg.boot_resamples < 0) throw wam::ConfigError("--boot must be >= 0");
    wam::OutputFormat format = wam::output_format_from_string(cfg.format);
    wam::ModelSpec spec;
    spec.kind = wam::model_kind_from_string(cfg.model);
    spec.knn_k = cfg.knn_k;
    spec.ridge_lambda = cfg.ridge;
    bool rate_mode = cfg.rate != "none";
    wam::RateVariant variant = rate_mode ? wam::rate_variant_from_string(cfg.rate)
                                         : wam::RateVariant::paper_gamma;

    wam::SchemaConfig schema;
    schema.separator = cfg.separator[0];
    if (!include.empty()) {
        schema.used_columns = include;
        schema.used_columns.push_back(cfg.outcome_col);
        for (const auto& s : sensitive_cols) schema.used_columns.push_back(s);
    }
    wam::Dataset ds = wam::load_csv(cfg.data_path, schema);
    if (!include.empty() && !exclude.empty())
        throw wam::ConfigError("--features and --exclude are mutually exclusive");

    wam::GroupIndex gi =
        wam::scalarize_sensitive(ds, sensitive_cols, cfg.bins, cfg.min_group_size);
    auto feature_cols =
        wam::resolve_features(ds, cfg.outcome_col, sensitive_cols, include, exclude);

    auto models = wam::fit_group_models(ds, gi, feature_cols, cfg.outcome_col, spec);

    wam::AuditResult result;
    result.data_path = cfg.data_path;
    result.outcome = cfg.outcome_col;
    result.sensitive_cols = sensitive_cols;
    result.feature_cols = feature_cols;
    result.model_kind = cfg.model;
    result.seed = cfg.seed;
    result.n_resamples = cfg.boot_resamples;
    result.warnings.dropped_rows = ds.dropped_rows;
    for (const auto& m : models)
        result.warnings.dropped_constant_columns += m.dropped_constant;

    if (rate_mode) {
        result.rate_matrix = wam::compute_rate_matrix(models, ds, gi, cfg.outcome_col,
                                                      variant, cfg.threshold);
        result.warnings.clamped_predictions = result.rate_matrix->clamp_warnings;
    } else {
        result.matrix = wam::compute_wam_matrix(models, ds, gi);
        result.matrix->outcome_name = cfg.outcome_col;
        result.warnings.unseen_levels = result.matrix->unseen_levels;
        if (spec.kind == wam::ModelKind::linear && gi.size() > 1) {
            for (std::size_t i = 0; i < gi.size(); ++i)
                for (std::size_t j = 0; j < gi.size(); ++j)
                    if (i != j)
                        result.analytic.push_back(wam::analytic_linear_variance(
                            models, ds, gi, gi.labels[i], gi.labels[j]));
        }
    }

    if (cfg.boot_resamples > 0) {
        wam::BootstrapReport rep =
            rate_mode
                ? wam::rate_bootstrap(ds, gi, feature_cols, cfg.outcome_col, spec, variant,
                                      cfg.threshold, cfg.boot_resamples, cfg.seed)
                : wam::bootstrap_audit(ds, gi, feature_cols, cfg.outcome_col, spec,
                                       cfg.boot_resamples, cfg.seed);
        result.warnings.discarded_resamples = rep.discarded;
        result.bootstrap = std::move(rep);
    }

    std::string text = wam::render(result, format);
    if (cfg.output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.output_path);
        if (!out) throw wam::ConfigError("cannot write to " + cfg.output_path);
        out << text;
    }
    // csv/json payloads stay machine-parsable; warnings go to stderr there.
    if (format != wam::OutputFormat::table)
        for (const auto& w : result.warnings.lines()) std::cerr << "warning: " << w << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-counterfactual fairness audit (WaM matrix with standard errors)"};
    AuditConfig cfg;
    app.add_option("--data", cfg.data_path, "CSV input file")->required();
    app.add_option("--y", cfg.outcome_col, "outcome column")->required();
    app.add_option("--s", cfg.sensitive, "sensitive column(s), comma-separated")->required();
    app.add_option("--features", cfg.features, "feature include list, comma-separated");
    app.add_option("--exclude", cfg.exclude, "columns to exclude from features");
    app.add_option("--model", cfg.model, "linear | logistic | knn")
        ->check(CLI::IsMember({"linear", "logistic", "knn"}));
    app.add_option("--k", cfg.knn_k, "k for knn");
    app.add_option("--bins", cfg.bins, "equal-width bins for a numeric sensitive column");
    app.add_option("--boot", cfg.boot_resamples, "bootstrap resamples (0 = point estimates)");
    app.add_option("--seed", cfg.seed, "bootstrap seed");
    app.add_option("--rate", cfg.rate, "none | paper_gamma | conditional_fpr")
        ->check(CLI::IsMember({"none", "paper_gamma", "conditional_fpr"}));
    app.add_option("--threshold", cfg.threshold, "positive-classification threshold");
    app.add_option("--min-group-size", cfg.min_group_size, "smallest allowed group");
    app.add_option("--ridge", cfg.ridge, "ridge penalty for linear fits");
    app.add_option("--format", cfg.format, "table | csv | json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    app.add_option("--out", cfg.output_path, "output file (default stdout)");
    app.add_option("--sep", cfg.separator, "CSV separator");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }
    if (const char* env_seed = std::getenv("WAM_SEED")) cfg.seed = std::strtoull(env_seed, nullptr, 10);

    try {
        return run_audit(cfg);
    } catch (const wam::ConfigError& e) {
        std::cerr << "config-error: " << e.what() << "\n";
        return 2;
    } catch (const wam::DataError& e) {
        std::cerr << "data-error: " << e.what() << "\n";
        return 3;
    } catch (const wam::FitError& e) {
        std::cerr << "fit-error: " << e.what() << "\n";
        return 4;
    }
}
