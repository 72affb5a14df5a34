#ifndef WAM_REPORT_HPP
#define WAM_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wam/inference.hpp"
#include "wam/rates.hpp"
#include "wam/wam.hpp"

namespace wam {

enum class OutputFormat { table, csv, json };

OutputFormat output_format_from_string(const std::string& s);

struct Warnings {
    std::size_t dropped_rows = 0;
    long unseen_levels = 0;
    long clamped_predictions = 0;
    int dropped_constant_columns = 0;
    int discarded_resamples = 0;
    std::vector<std::string> lines() const;  // empty when nothing to report
};

// Everything one audit run produced. Table output display-rounds to two
// decimals; csv/json carry full precision.
struct AuditResult {
    std::optional<WamMatrix> matrix;
    std::optional<RateMatrix> rate_matrix;
    std::vector<LinearVarianceReport> analytic;
    std::optional<BootstrapReport> bootstrap;
    Warnings warnings;

    std::string data_path;
    std::string outcome;
    std::vector<std::string> sensitive_cols;
    std::vector<std::string> feature_cols;
    std::string model_kind;
    std::uint64_t seed = 0;
    int n_resamples = 0;
};

std::string render(const AuditResult& result, OutputFormat format);

// Full-precision decimal that round-trips the double exactly.
std::string format_full(double v);

}  // namespace wam

#endif
