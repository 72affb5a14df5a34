#ifndef WAM_MODEL_HPP
#define WAM_MODEL_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "wam/encoding.hpp"

namespace wam {

enum class ModelKind { linear, logistic, knn };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::linear;
    int knn_k = 10;
    bool knn_standardize = true;
    int irls_max_iter = 50;
    double irls_tol = 1e-8;
    double ridge_lambda = 0.0;
};

// One fitted per-group conditional-mean estimator behind a uniform predict
// interface. Immutable after fit; predict is reentrant.
struct FittedModel {
    ModelSpec spec;
    EncodingMap encoding;
    std::vector<int> kept;  // design columns retained after constant-drop
    std::string fit_group;
    Eigen::Index n_fit = 0;
    int dropped_constant = 0;

    // linear / logistic
    Eigen::VectorXd beta;  // slopes, length = kept.size()
    double intercept = 0.0;
    // linear only: sigma2 = RSS/(n-p-1) and the full (p+1)x(p+1) covariance
    // of (intercept, beta).
    double sigma2 = 0.0;
    Eigen::MatrixXd vcov_full;

    // knn
    Eigen::MatrixXd train_x;  // standardized when spec.knn_standardize
    Eigen::VectorXd train_y;
    Eigen::VectorXd feat_mean, feat_sd;

    Eigen::VectorXd predict_encoded(const Eigen::MatrixXd& raw_rows) const;
};

FittedModel fit(const ModelSpec& spec, const Dataset& ds,
                const std::vector<std::string>& feature_cols,
                const std::string& outcome_col, const std::vector<int>& fit_rows,
                const std::string& group_label = "");

// Predict for arbitrary dataset rows through the model's own encoding map.
Eigen::VectorXd predict(const FittedModel& model, const Dataset& ds,
                        const std::vector<int>& rows, long* unseen_levels = nullptr);

// OLS slope covariance sigma2 * (Xc' Xc)^-1 on the fit-mean-centered design
// (the slope block of vcov_full). Linear models only.
Eigen::MatrixXd coefficient_covariance(const FittedModel& model);

// Audit-trail round trip; reproduces linear/logistic predictions bit-exactly.
std::string model_to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);

}  // namespace wam

#endif
