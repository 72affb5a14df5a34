#ifndef WAM_INFERENCE_HPP
#define WAM_INFERENCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wam/rates.hpp"
#include "wam/wam.hpp"

namespace wam {

struct ConfidenceInterval {
    double lo = 0.0, hi = 0.0;
};

// Normal-approximation interval; only the 0.90/0.95/0.99 quantiles ship.
ConfidenceInterval confidence_interval(double estimate, double se, double level = 0.95);

// Sample moments of one group's rows in a reference model's feature
// coordinates: A_i and Cov-hat(X_i) (n-1 denominator).
struct GroupMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::size_t n = 0;
};

GroupMoments group_moments(const FittedModel& reference_model, const Dataset& ds,
                           const std::vector<int>& rows);

// Exact sampling variance of the linear-case estimate: the coefficient
// sampling term A' Cov(beta) A (with the intercept carried as an augmented
// coordinate, so its sampling variability is included) plus the feature
// sampling term beta' Cov(X_i) beta / n_i.
struct LinearVarianceReport {
    std::string act, cf;
    double nu_hat = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    ConfidenceInterval ci95;
    double term_sampling_beta = 0.0;
    double term_sampling_A = 0.0;
};

LinearVarianceReport analytic_linear_variance(const std::vector<FittedModel>& models,
                                              const Dataset& ds, const GroupIndex& gi,
                                              const std::string& act_group,
                                              const std::string& cf_group);

struct BootstrapRow {
    std::string act, cf;
    double myGrpEst = 0.0, myGrpSE = 0.0;
    double theirGrpEst = 0.0, theirGrpSE = 0.0;
    double bias = 0.0, biasSE = 0.0;
    // Full-data plug-in estimates, reported alongside the resample means.
    double pluginMyGrp = 0.0, pluginTheirGrp = 0.0;
};

struct BootstrapReport {
    std::vector<BootstrapRow> rows;
    int n_resamples = 0;
    std::uint64_t seed = 0;
    int discarded = 0;  // failed resamples that were redrawn
    std::string model_kind;
    std::string outcome_name;
};

using PairList = std::vector<std::pair<std::string, std::string>>;

// Stratified bootstrap: each resample draws n_i rows with replacement
// independently within each group, refits every group model, and recomputes
// the requested cells. Reported estimates are resample means; SEs are
// resample standard deviations. Deterministic for a given seed regardless
// of execution width (per-slot RNG streams, fixed-order reduction).
BootstrapReport bootstrap_audit(const Dataset& ds, const GroupIndex& gi,
                                const std::vector<std::string>& feature_cols,
                                const std::string& outcome_col, const ModelSpec& spec,
                                int n_resamples, std::uint64_t seed,
                                const PairList& pairs = {},
                                Execution exec = Execution::parallel);

// Same engine with gamma cells instead of nu cells; a resample with an
// undefined requested cell is discarded and redrawn.
BootstrapReport rate_bootstrap(const Dataset& ds, const GroupIndex& gi,
                               const std::vector<std::string>& feature_cols,
                               const std::string& outcome_col, const ModelSpec& spec,
                               RateVariant variant, double threshold, int n_resamples,
                               std::uint64_t seed, const PairList& pairs = {},
                               Execution exec = Execution::parallel);

}  // namespace wam

#endif
