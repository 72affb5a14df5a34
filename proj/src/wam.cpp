#include "wam/wam.hpp"

#include <algorithm>

#include "wam/errors.hpp"

namespace wam {

double sequential_mean(const Eigen::VectorXd& v) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) sum += v(i);
    return sum / static_cast<double>(v.size());
}

std::vector<std::string> resolve_features(const Dataset& ds, const std::string& outcome_col,
                                          const std::vector<std::string>& sensitive_cols,
                                          const std::vector<std::string>& include,
                                          const std::vector<std::string>& exclude) {
    auto is_reserved = [&](const std::string& name) {
        if (name == outcome_col) return true;
        return std::find(sensitive_cols.begin(), sensitive_cols.end(), name) !=
               sensitive_cols.end();
    };
    std::vector<std::string> feats;
    if (include.empty()) {
        for (const auto& c : ds.columns)
            if (!is_reserved(c.name) &&
                std::find(exclude.begin(), exclude.end(), c.name) == exclude.end())
                feats.push_back(c.name);
    } else {
        for (const auto& name : include) {
            if (!ds.has_column(name)) throw ConfigError("feature column not found: " + name);
            if (is_reserved(name))
                throw ConfigError("feature list may not contain the outcome or a sensitive column: " + name);
            if (std::find(exclude.begin(), exclude.end(), name) != exclude.end())
                throw ConfigError("column both included and excluded: " + name);
            feats.push_back(name);
        }
    }
    if (feats.empty()) throw ConfigError("no feature columns left after exclusions");
    return feats;
}

std::vector<FittedModel> fit_group_models(const Dataset& ds, const GroupIndex& gi,
                                          const std::vector<std::string>& feature_cols,
                                          const std::string& outcome_col,
                                          const ModelSpec& spec) {
    std::vector<FittedModel> models;
    models.reserve(gi.size());
    for (std::size_t g = 0; g < gi.size(); ++g)
        models.push_back(fit(spec, ds, feature_cols, outcome_col, gi.rows[g], gi.labels[g]));
    return models;
}

WamMatrix compute_wam_matrix(const std::vector<FittedModel>& models, const Dataset& ds,
                             const GroupIndex& gi, Execution exec) {
    if (models.size() != gi.size())
        throw ConfigError("model list and group index are misaligned");
    const int s = static_cast<int>(gi.size());
    WamMatrix out;
    out.group_labels = gi.labels;
    out.n_per_group = gi.sizes();
    out.model_kind = models.empty() ? "" : to_string(models[0].spec.kind);
    out.values.resize(s, s);
    std::vector<long> unseen(static_cast<std::size_t>(s) * s, 0);

#pragma omp parallel for collapse(2) schedule(dynamic) if (exec == Execution::parallel)
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            long u = 0;
            Eigen::VectorXd pred = predict(models[j], ds, gi.rows[i], &u);
            out.values(i, j) = sequential_mean(pred);
            unseen[static_cast<std::size_t>(i) * s + j] = u;
        }
    }
    for (long u : unseen) out.unseen_levels += u;
    return out;
}

CounterfactualPredictions counterfactual_predictions(const std::vector<FittedModel>& models,
                                                     const Dataset& ds, const GroupIndex& gi,
                                                     const std::string& actual_group,
                                                     const std::string& cf_group) {
    const int i = gi.index_of(actual_group);
    const int j = gi.index_of(cf_group);
    CounterfactualPredictions cp;
    cp.actual_group = actual_group;
    cp.cf_group = cf_group;
    cp.row_ids = gi.rows[i];
    cp.per_row = predict(models[j], ds, gi.rows[i]);
    return cp;
}

}  // namespace wam
