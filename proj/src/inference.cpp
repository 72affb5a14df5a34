#include "wam/inference.hpp"

#include <cmath>
#include <random>

#include "wam/errors.hpp"

namespace wam {

ConfidenceInterval confidence_interval(double estimate, double se, double level) {
    if (se < 0.0) throw ConfigError("standard error must be nonnegative");
    double z;
    if (level == 0.90)
        z = 1.644854;
    else if (level == 0.95)
        z = 1.959964;
    else if (level == 0.99)
        z = 2.575829;
    else
        throw ConfigError("unsupported confidence level (0.90/0.95/0.99 available)");
    return {estimate - z * se, estimate + z * se};
}

GroupMoments group_moments(const FittedModel& reference_model, const Dataset& ds,
                           const std::vector<int>& rows) {
    Eigen::MatrixXd x = encode_rows(ds, reference_model.encoding, rows);
    Eigen::MatrixXd xk(x.rows(), static_cast<Eigen::Index>(reference_model.kept.size()));
    for (std::size_t c = 0; c < reference_model.kept.size(); ++c)
        xk.col(static_cast<Eigen::Index>(c)) = x.col(reference_model.kept[c]);

    GroupMoments gm;
    gm.n = rows.size();
    gm.mean = xk.colwise().mean();
    Eigen::MatrixXd centered = xk.rowwise() - gm.mean.transpose();
    gm.cov = centered.transpose() * centered / std::max<double>(1.0, double(gm.n) - 1.0);
    return gm;
}

LinearVarianceReport analytic_linear_variance(const std::vector<FittedModel>& models,
                                              const Dataset& ds, const GroupIndex& gi,
                                              const std::string& act_group,
                                              const std::string& cf_group) {
    const int i = gi.index_of(act_group);
    const int j = gi.index_of(cf_group);
    const FittedModel& mj = models[j];
    if (mj.spec.kind != ModelKind::linear)
        throw ConfigError("analytic variance requires a linear model");

    GroupMoments gm = group_moments(mj, ds, gi.rows[i]);
    const Eigen::Index p = mj.beta.size();

    // Augmented mean (1, A_i): the quadratic form against the full
    // coefficient covariance is the variance of the fitted value at A_i,
    // which is invariant to the centering coordinate system.
    Eigen::VectorXd a_aug(p + 1);
    a_aug(0) = 1.0;
    a_aug.tail(p) = gm.mean;

    LinearVarianceReport r;
    r.act = act_group;
    r.cf = cf_group;
    r.nu_hat = mj.intercept + mj.beta.dot(gm.mean);
    r.term_sampling_beta = a_aug.dot(mj.vcov_full * a_aug);
    r.term_sampling_A = mj.beta.dot(gm.cov * mj.beta) / static_cast<double>(gm.n);
    r.variance = r.term_sampling_beta + r.term_sampling_A;
    r.std_error = std::sqrt(std::max(0.0, r.variance));
    r.ci95 = confidence_interval(r.nu_hat, r.std_error, 0.95);
    return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent RNG stream per (seed, resample slot, redraw attempt).
std::mt19937_64 slot_rng(std::uint64_t seed, std::uint64_t slot, std::uint64_t attempt) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(slot + 1));
    s = splitmix64(s ^ splitmix64(attempt + 1));
    return std::mt19937_64(s);
}

struct CellMatrix {
    Eigen::MatrixXd values;
    std::vector<int> defined;  // flattened s*s, 1 = usable
};

struct EngineConfig {
    bool rate = false;
    RateVariant variant = RateVariant::paper_gamma;
    double threshold = 0.5;
};

CellMatrix audit_cells(const Dataset& ds, const std::vector<std::vector<int>>& rows_per_group,
                       const std::vector<std::string>& labels,
                       const std::vector<std::string>& feature_cols,
                       const std::string& outcome_col, const ModelSpec& spec,
                       const EngineConfig& eng) {
    const int s = static_cast<int>(rows_per_group.size());
    std::vector<FittedModel> models;
    models.reserve(s);
    for (int g = 0; g < s; ++g)
        models.push_back(fit(spec, ds, feature_cols, outcome_col, rows_per_group[g], labels[g]));

    CellMatrix cm;
    cm.values.resize(s, s);
    cm.defined.assign(static_cast<std::size_t>(s) * s, 1);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            Eigen::VectorXd pred = predict(models[j], ds, rows_per_group[i]);
            if (eng.rate) {
                if (models[j].spec.kind == ModelKind::linear) clamp_probs(pred);
                bool defined = true;
                cm.values(i, j) = gamma_from_probs(pred, eng.variant, eng.threshold, defined);
                cm.defined[static_cast<std::size_t>(i) * s + j] = defined ? 1 : 0;
            } else {
                cm.values(i, j) = sequential_mean(pred);
            }
        }
    }
    return cm;
}

PairList default_pairs(const GroupIndex& gi) {
    PairList pairs;
    for (std::size_t i = 0; i < gi.size(); ++i)
        for (std::size_t j = 0; j < gi.size(); ++j)
            if (i != j) pairs.emplace_back(gi.labels[i], gi.labels[j]);
    if (pairs.empty()) pairs.emplace_back(gi.labels[0], gi.labels[0]);  // s == 1
    return pairs;
}

double stdev(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

double seq_mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

BootstrapReport bootstrap_engine(const Dataset& ds, const GroupIndex& gi,
                                 const std::vector<std::string>& feature_cols,
                                 const std::string& outcome_col, const ModelSpec& spec,
                                 int n_resamples, std::uint64_t seed, const PairList& pairs_in,
                                 Execution exec, const EngineConfig& eng) {
    if (n_resamples < 2) throw ConfigError("n_resamples must be >= 2");
    const int s = static_cast<int>(gi.size());
    PairList pairs = pairs_in.empty() ? default_pairs(gi) : pairs_in;

    // Cells a resample must deliver: (i,i) and (i,j) for each requested pair.
    std::vector<std::pair<int, int>> idx_pairs;
    idx_pairs.reserve(pairs.size());
    for (const auto& pr : pairs)
        idx_pairs.emplace_back(gi.index_of(pr.first), gi.index_of(pr.second));

    CellMatrix plugin = audit_cells(ds, gi.rows, gi.labels, feature_cols, outcome_col, spec, eng);

    const int max_attempts = 64;
    std::vector<Eigen::MatrixXd> slot_values(static_cast<std::size_t>(n_resamples));
    std::vector<int> slot_discards(static_cast<std::size_t>(n_resamples), 0);
    std::vector<std::string> slot_error(static_cast<std::size_t>(n_resamples));

#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (int b = 0; b < n_resamples; ++b) {
        bool done = false;
        for (int attempt = 0; attempt < max_attempts && !done; ++attempt) {
            auto rng = slot_rng(seed, static_cast<std::uint64_t>(b),
                                static_cast<std::uint64_t>(attempt));
            std::vector<std::vector<int>> resampled(s);
            for (int g = 0; g < s; ++g) {
                const auto& src = gi.rows[g];
                std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
                resampled[g].resize(src.size());
                for (auto& r : resampled[g]) r = src[pick(rng)];
            }
            try {
                CellMatrix cm = audit_cells(ds, resampled, gi.labels, feature_cols,
                                            outcome_col, spec, eng);
                bool usable = true;
                for (const auto& [i, j] : idx_pairs)
                    if (!cm.defined[static_cast<std::size_t>(i) * s + i] ||
                        !cm.defined[static_cast<std::size_t>(i) * s + j])
                        usable = false;
                if (usable) {
                    slot_values[b] = std::move(cm.values);
                    done = true;
                } else {
                    ++slot_discards[b];
                }
            } catch (const FitError&) {
                ++slot_discards[b];
            }
        }
        if (!done) slot_error[b] = "resample slot exhausted redraw attempts";
    }

    int discards = 0;
    for (int b = 0; b < n_resamples; ++b) {
        if (!slot_error[b].empty()) throw FitError(slot_error[b]);
        discards += slot_discards[b];
    }
    if (discards > n_resamples / 10)
        throw FitError("bootstrap discard rate exceeded 10% (" + std::to_string(discards) +
                       " of " + std::to_string(n_resamples) + " resamples redrawn)");

    BootstrapReport rep;
    rep.n_resamples = n_resamples;
    rep.seed = seed;
    rep.discarded = discards;
    rep.model_kind = to_string(spec.kind);
    rep.outcome_name = outcome_col;
    std::vector<double> my(n_resamples), their(n_resamples), bias(n_resamples);
    for (std::size_t pidx = 0; pidx < idx_pairs.size(); ++pidx) {
        const auto [i, j] = idx_pairs[pidx];
        for (int b = 0; b < n_resamples; ++b) {
            my[b] = slot_values[b](i, i);
            their[b] = slot_values[b](i, j);
            bias[b] = my[b] - their[b];
        }
        BootstrapRow row;
        row.act = pairs[pidx].first;
        row.cf = pairs[pidx].second;
        row.myGrpEst = seq_mean(my);
        row.myGrpSE = stdev(my, row.myGrpEst);
        row.theirGrpEst = seq_mean(their);
        row.theirGrpSE = stdev(their, row.theirGrpEst);
        row.bias = row.myGrpEst - row.theirGrpEst;
        row.biasSE = stdev(bias, seq_mean(bias));
        row.pluginMyGrp = plugin.values(i, i);
        row.pluginTheirGrp = plugin.values(i, j);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace

BootstrapReport bootstrap_audit(const Dataset& ds, const GroupIndex& gi,
                                const std::vector<std::string>& feature_cols,
                                const std::string& outcome_col, const ModelSpec& spec,
                                int n_resamples, std::uint64_t seed, const PairList& pairs,
                                Execution exec) {
    EngineConfig eng;
    return bootstrap_engine(ds, gi, feature_cols, outcome_col, spec, n_resamples, seed,
                            pairs, exec, eng);
}

BootstrapReport rate_bootstrap(const Dataset& ds, const GroupIndex& gi,
                               const std::vector<std::string>& feature_cols,
                               const std::string& outcome_col, const ModelSpec& spec,
                               RateVariant variant, double threshold, int n_resamples,
                               std::uint64_t seed, const PairList& pairs, Execution exec) {
    const Column& y = ds.column(outcome_col);
    if (!y.is_numeric) throw DataError("rate audit outcome must be numeric 0/1");
    for (double v : y.values)
        if (v != 0.0 && v != 1.0) throw DataError("rate audit requires a binary 0/1 outcome");
    EngineConfig eng;
    eng.rate = true;
    eng.variant = variant;
    eng.threshold = threshold;
    return bootstrap_engine(ds, gi, feature_cols, outcome_col, spec, n_resamples, seed,
                            pairs, exec, eng);
}

}  // namespace wam
