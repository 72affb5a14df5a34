#include "wam/rates.hpp"

#include <cmath>
#include <limits>

#include "wam/errors.hpp"

namespace wam {

std::string to_string(RateVariant v) {
    return v == RateVariant::paper_gamma ? "paper_gamma" : "conditional_fpr";
}

RateVariant rate_variant_from_string(const std::string& s) {
    if (s == "paper_gamma") return RateVariant::paper_gamma;
    if (s == "conditional_fpr") return RateVariant::conditional_fpr;
    throw ConfigError("unknown rate variant: " + s);
}

double gamma_from_probs(const Eigen::VectorXd& probs, RateVariant variant,
                        double threshold, bool& defined) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        const double m = probs(k);
        const bool positive = m >= threshold;
        if (positive) num += 1.0 - m;
        if (variant == RateVariant::paper_gamma) {
            if (positive) den += 1.0;
        } else {
            den += 1.0 - m;
        }
    }
    if (den == 0.0) {
        defined = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    defined = true;
    return num / den;
}

long clamp_probs(Eigen::VectorXd& probs) {
    long clamped = 0;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        if (probs(k) < 0.0) {
            probs(k) = 0.0;
            ++clamped;
        } else if (probs(k) > 1.0) {
            probs(k) = 1.0;
            ++clamped;
        }
    }
    return clamped;
}

RateMatrix compute_rate_matrix(const std::vector<FittedModel>& models, const Dataset& ds,
                               const GroupIndex& gi, const std::string& outcome_col,
                               RateVariant variant, double threshold, Execution exec) {
    if (models.size() != gi.size())
        throw ConfigError("model list and group index are misaligned");
    const Column& y = ds.column(outcome_col);
    if (!y.is_numeric) throw DataError("rate audit outcome must be numeric 0/1");
    for (double v : y.values)
        if (v != 0.0 && v != 1.0)
            throw DataError("rate audit requires a binary 0/1 outcome; found " +
                            std::to_string(v));

    const int s = static_cast<int>(gi.size());
    RateMatrix out;
    out.group_labels = gi.labels;
    out.n_per_group = gi.sizes();
    out.variant = variant;
    out.threshold = threshold;
    out.model_kind = models.empty() ? "" : to_string(models[0].spec.kind);
    out.outcome_name = outcome_col;
    out.values.resize(s, s);
    std::vector<long> clamps(static_cast<std::size_t>(s) * s, 0);
    std::vector<int> defined_flat(static_cast<std::size_t>(s) * s, 1);

#pragma omp parallel for collapse(2) schedule(dynamic) if (exec == Execution::parallel)
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            Eigen::VectorXd probs = predict(models[j], ds, gi.rows[i]);
            if (models[j].spec.kind == ModelKind::linear)
                clamps[static_cast<std::size_t>(i) * s + j] = clamp_probs(probs);
            bool defined = true;
            out.values(i, j) = gamma_from_probs(probs, variant, threshold, defined);
            defined_flat[static_cast<std::size_t>(i) * s + j] = defined ? 1 : 0;
        }
    }
    out.defined.assign(s, std::vector<bool>(s, true));
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            out.defined[i][j] = defined_flat[static_cast<std::size_t>(i) * s + j] != 0;
    for (long c : clamps) out.clamp_warnings += c;
    return out;
}

}  // namespace wam
