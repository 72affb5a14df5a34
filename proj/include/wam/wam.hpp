#ifndef WAM_WAM_HPP
#define WAM_WAM_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wam/dataset.hpp"
#include "wam/model.hpp"

namespace wam {

// Serial path is the reference implementation; the parallel path must
// produce bit-identical results (per-cell work is independent and each
// cell reduces in fixed row order).
enum class Execution { serial, parallel };

// Row i = actual group, column j = counterfactual group: values(i,j) is the
// mean prediction of group j's model over group i's rows.
struct WamMatrix {
    std::vector<std::string> group_labels;
    Eigen::MatrixXd values;
    std::vector<std::size_t> n_per_group;
    std::string model_kind;
    std::string outcome_name;
    long unseen_levels = 0;  // summed over all cross-group encodings
};

struct CounterfactualPredictions {
    std::string actual_group;
    std::string cf_group;
    Eigen::VectorXd per_row;
    std::vector<int> row_ids;
};

// One model per group, each fit only on that group's rows with its own
// encoding. Feature columns must exclude the outcome and sensitive columns.
std::vector<FittedModel> fit_group_models(const Dataset& ds, const GroupIndex& gi,
                                          const std::vector<std::string>& feature_cols,
                                          const std::string& outcome_col,
                                          const ModelSpec& spec);

WamMatrix compute_wam_matrix(const std::vector<FittedModel>& models, const Dataset& ds,
                             const GroupIndex& gi, Execution exec = Execution::parallel);

CounterfactualPredictions counterfactual_predictions(const std::vector<FittedModel>& models,
                                                     const Dataset& ds, const GroupIndex& gi,
                                                     const std::string& actual_group,
                                                     const std::string& cf_group);

// Fixed-order mean used for every per-cell reduction.
double sequential_mean(const Eigen::VectorXd& v);

// Resolve the audited feature list: all columns except outcome and sensitive
// (default), or an explicit include list, minus the exclude list.
std::vector<std::string> resolve_features(const Dataset& ds, const std::string& outcome_col,
                                          const std::vector<std::string>& sensitive_cols,
                                          const std::vector<std::string>& include,
                                          const std::vector<std::string>& exclude);

}  // namespace wam

#endif
