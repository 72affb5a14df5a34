#include "wam/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "wam/errors.hpp"

namespace wam {

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "table") return OutputFormat::table;
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown output format: " + s);
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> Warnings::lines() const {
    std::vector<std::string> out;
    if (dropped_rows)
        out.push_back("dropped " + std::to_string(dropped_rows) + " rows with missing values");
    if (unseen_levels)
        out.push_back(std::to_string(unseen_levels) +
                      " cross-group encodings hit levels unseen during fit (mapped to reference)");
    if (clamped_predictions)
        out.push_back(std::to_string(clamped_predictions) +
                      " linear predictions clamped into [0,1]");
    if (dropped_constant_columns)
        out.push_back(std::to_string(dropped_constant_columns) +
                      " constant design columns dropped before fitting");
    if (discarded_resamples)
        out.push_back(std::to_string(discarded_resamples) + " failed resamples redrawn");
    return out;
}

namespace {

std::string fmt2(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string pad_left(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

// act-rows x cf-columns grid shared by WaM and rate matrices.
std::string matrix_table(const std::vector<std::string>& labels, const Eigen::MatrixXd& m,
                         const std::vector<std::vector<bool>>* defined) {
    const int s = static_cast<int>(labels.size());
    std::vector<std::string> row_names(s), col_names(s);
    for (int i = 0; i < s; ++i) {
        row_names[i] = labels[i] + ".act";
        col_names[i] = labels[i] + ".cf";
    }
    std::size_t name_w = 0;
    for (const auto& r : row_names) name_w = std::max(name_w, r.size());
    std::vector<std::size_t> col_w(s);
    std::vector<std::vector<std::string>> cells(s, std::vector<std::string>(s));
    for (int j = 0; j < s; ++j) {
        col_w[j] = col_names[j].size();
        for (int i = 0; i < s; ++i) {
            bool ok = !defined || (*defined)[i][j];
            cells[i][j] = ok ? fmt2(m(i, j)) : "NA";
            col_w[j] = std::max(col_w[j], cells[i][j].size());
        }
    }
    std::ostringstream out;
    out << std::string(name_w, ' ');
    for (int j = 0; j < s; ++j) out << "  " << pad_left(col_names[j], col_w[j]);
    out << "\n";
    for (int i = 0; i < s; ++i) {
        out << pad_right(row_names[i], name_w);
        for (int j = 0; j < s; ++j) out << "  " << pad_left(cells[i][j], col_w[j]);
        out << "\n";
    }
    return out.str();
}

std::string matrix_csv(const std::vector<std::string>& labels, const Eigen::MatrixXd& m,
                       const std::vector<std::vector<bool>>* defined) {
    const int s = static_cast<int>(labels.size());
    std::ostringstream out;
    out << "act";
    for (int j = 0; j < s; ++j) out << "," << labels[j] << ".cf";
    out << "\n";
    for (int i = 0; i < s; ++i) {
        out << labels[i] << ".act";
        for (int j = 0; j < s; ++j) {
            bool ok = !defined || (*defined)[i][j];
            out << "," << (ok ? format_full(m(i, j)) : "NA");
        }
        out << "\n";
    }
    return out.str();
}

const char* kBootHeader =
    "act,cf,myGrpEst,myGrpSE,theirGrpEst,theirGrpSE,bias,biasSE,pluginMyGrp,pluginTheirGrp";

std::string bootstrap_csv(const BootstrapReport& rep) {
    std::ostringstream out;
    out << kBootHeader << "\n";
    for (const auto& r : rep.rows)
        out << r.act << "," << r.cf << "," << format_full(r.myGrpEst) << ","
            << format_full(r.myGrpSE) << "," << format_full(r.theirGrpEst) << ","
            << format_full(r.theirGrpSE) << "," << format_full(r.bias) << ","
            << format_full(r.biasSE) << "," << format_full(r.pluginMyGrp) << ","
            << format_full(r.pluginTheirGrp) << "\n";
    return out.str();
}

std::string bootstrap_table(const BootstrapReport& rep) {
    std::vector<std::string> headers = {"act",    "cf",     "myGrpEst", "myGrpSE",
                                        "theirGrpEst", "theirGrpSE", "bias", "biasSE"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
        rows.push_back({r.act, r.cf, fmt2(r.myGrpEst), fmt2(r.myGrpSE), fmt2(r.theirGrpEst),
                        fmt2(r.theirGrpSE), fmt2(r.bias), fmt2(r.biasSE)});
    std::vector<std::size_t> w(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        w[c] = headers[c].size();
        for (const auto& row : rows) w[c] = std::max(w[c], row[c].size());
    }
    std::ostringstream out;
    for (std::size_t c = 0; c < headers.size(); ++c)
        out << (c ? "  " : "") << (c < 2 ? pad_right(headers[c], w[c]) : pad_left(headers[c], w[c]));
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < headers.size(); ++c)
            out << (c ? "  " : "") << (c < 2 ? pad_right(row[c], w[c]) : pad_left(row[c], w[c]));
        out << "\n";
    }
    return out.str();
}

std::string analytic_csv(const std::vector<LinearVarianceReport>& reports) {
    std::ostringstream out;
    out << "act,cf,nuHat,stdErr,ci95lo,ci95hi,termSamplingBeta,termSamplingA\n";
    for (const auto& r : reports)
        out << r.act << "," << r.cf << "," << format_full(r.nu_hat) << ","
            << format_full(r.std_error) << "," << format_full(r.ci95.lo) << ","
            << format_full(r.ci95.hi) << "," << format_full(r.term_sampling_beta) << ","
            << format_full(r.term_sampling_A) << "\n";
    return out.str();
}

std::string analytic_table(const std::vector<LinearVarianceReport>& reports) {
    std::ostringstream out;
    out << "act         cf          nuHat   stdErr   ci95lo   ci95hi\n";
    for (const auto& r : reports)
        out << pad_right(r.act, 10) << "  " << pad_right(r.cf, 10) << "  "
            << pad_left(fmt2(r.nu_hat), 7) << "  " << pad_left(fmt2(r.std_error), 7) << "  "
            << pad_left(fmt2(r.ci95.lo), 7) << "  " << pad_left(fmt2(r.ci95.hi), 7) << "\n";
    return out.str();
}

nlohmann::json matrix_json(const std::vector<std::string>& labels, const Eigen::MatrixXd& m,
                           const std::vector<std::vector<bool>>* defined) {
    const int s = static_cast<int>(labels.size());
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < s; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < s; ++j) {
            if (defined && !(*defined)[i][j])
                row.push_back(nullptr);
            else
                row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return {{"group_labels", labels}, {"values", std::move(rows)}};
}

}  // namespace

std::string render(const AuditResult& res, OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::json j;
        j["metadata"] = {{"data", res.data_path},
                         {"outcome", res.outcome},
                         {"sensitive", res.sensitive_cols},
                         {"features", res.feature_cols},
                         {"model", res.model_kind},
                         {"seed", res.seed},
                         {"n_resamples", res.n_resamples},
                         {"warnings", res.warnings.lines()}};
        if (res.matrix) {
            j["wam_matrix"] = matrix_json(res.matrix->group_labels, res.matrix->values, nullptr);
            j["wam_matrix"]["n_per_group"] = res.matrix->n_per_group;
        }
        if (res.rate_matrix) {
            j["rate_matrix"] = matrix_json(res.rate_matrix->group_labels,
                                           res.rate_matrix->values, &res.rate_matrix->defined);
            j["rate_matrix"]["variant"] = to_string(res.rate_matrix->variant);
            j["rate_matrix"]["threshold"] = res.rate_matrix->threshold;
            j["rate_matrix"]["n_per_group"] = res.rate_matrix->n_per_group;
        }
        if (!res.analytic.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : res.analytic)
                arr.push_back({{"act", r.act},
                               {"cf", r.cf},
                               {"nuHat", r.nu_hat},
                               {"variance", r.variance},
                               {"stdErr", r.std_error},
                               {"ci95", {r.ci95.lo, r.ci95.hi}},
                               {"termSamplingBeta", r.term_sampling_beta},
                               {"termSamplingA", r.term_sampling_A}});
            j["analytic"] = std::move(arr);
        }
        if (res.bootstrap) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : res.bootstrap->rows)
                arr.push_back({{"act", r.act},
                               {"cf", r.cf},
                               {"myGrpEst", r.myGrpEst},
                               {"myGrpSE", r.myGrpSE},
                               {"theirGrpEst", r.theirGrpEst},
                               {"theirGrpSE", r.theirGrpSE},
                               {"bias", r.bias},
                               {"biasSE", r.biasSE},
                               {"pluginMyGrp", r.pluginMyGrp},
                               {"pluginTheirGrp", r.pluginTheirGrp}});
            j["bootstrap"] = {{"rows", std::move(arr)},
                              {"n_resamples", res.bootstrap->n_resamples},
                              {"seed", res.bootstrap->seed},
                              {"discarded", res.bootstrap->discarded}};
        }
        return j.dump(2) + "\n";
    }

    if (format == OutputFormat::csv) {
        std::ostringstream out;
        bool first = true;
        auto sep = [&] {
            if (!first) out << "\n";
            first = false;
        };
        if (res.matrix) {
            sep();
            out << matrix_csv(res.matrix->group_labels, res.matrix->values, nullptr);
        }
        if (res.rate_matrix) {
            sep();
            out << matrix_csv(res.rate_matrix->group_labels, res.rate_matrix->values,
                              &res.rate_matrix->defined);
        }
        if (!res.analytic.empty()) {
            sep();
            out << analytic_csv(res.analytic);
        }
        if (res.bootstrap) {
            sep();
            out << bootstrap_csv(*res.bootstrap);
        }
        return out.str();
    }

    std::ostringstream out;
    if (res.matrix) {
        out << "WaM matrix (" << res.model_kind << ", outcome " << res.outcome << ")\n\n";
        out << matrix_table(res.matrix->group_labels, res.matrix->values, nullptr) << "\n";
    }
    if (res.rate_matrix) {
        out << "Counterfactual positive-rate matrix (" << to_string(res.rate_matrix->variant)
            << ", threshold " << fmt2(res.rate_matrix->threshold) << ")\n\n";
        out << matrix_table(res.rate_matrix->group_labels, res.rate_matrix->values,
                            &res.rate_matrix->defined)
            << "\n";
    }
    if (!res.analytic.empty()) {
        out << "Analytic standard errors (linear)\n\n" << analytic_table(res.analytic) << "\n";
    }
    if (res.bootstrap) {
        out << "Bootstrap report (" << res.bootstrap->n_resamples << " resamples, seed "
            << res.bootstrap->seed << ")\n\n";
        out << bootstrap_table(*res.bootstrap) << "\n";
    }
    auto warn = res.warnings.lines();
    if (!warn.empty()) {
        out << "Warnings:\n";
        for (const auto& w : warn) out << "  - " << w << "\n";
    }
    return out.str();
}

}  // namespace wam
