#ifndef WAM_RATES_HPP
#define WAM_RATES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wam/wam.hpp"

namespace wam {

// paper_gamma normalizes the expected false-positive mass by the predicted
// positive count (a false-discovery-style rate); conditional_fpr normalizes
// by the expected negative mass (textbook FPR). Which one an audit reports
// is recorded in the output metadata.
enum class RateVariant { paper_gamma, conditional_fpr };

std::string to_string(RateVariant v);
RateVariant rate_variant_from_string(const std::string& s);

struct RateMatrix {
    std::vector<std::string> group_labels;
    Eigen::MatrixXd values;               // gamma-hat per (act, cf) cell
    std::vector<std::vector<bool>> defined;  // false where the denominator is 0
    RateVariant variant = RateVariant::paper_gamma;
    double threshold = 0.5;
    std::vector<std::size_t> n_per_group;
    std::string model_kind;
    std::string outcome_name;
    long clamp_warnings = 0;  // linear predictions clamped into [0,1]
};

// gamma for one cell from raw predicted probabilities. The indicator is
// closed at the threshold (m >= threshold counts as positive). Returns NaN
// and sets defined=false on an empty denominator.
double gamma_from_probs(const Eigen::VectorXd& probs, RateVariant variant,
                        double threshold, bool& defined);

// Clamp linear-model outputs into [0,1]; returns the number clamped.
long clamp_probs(Eigen::VectorXd& probs);

RateMatrix compute_rate_matrix(const std::vector<FittedModel>& models, const Dataset& ds,
                               const GroupIndex& gi, const std::string& outcome_col,
                               RateVariant variant, double threshold = 0.5,
                               Execution exec = Execution::parallel);

}  // namespace wam

#endif
