#ifndef WAM_ENCODING_HPP
#define WAM_ENCODING_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wam/dataset.hpp"

namespace wam {

// How one original column maps to design columns. Numeric columns pass
// through; a categorical column with L levels becomes L-1 indicator columns
// (reference level = first level observed in the fit rows, dropped). Levels
// unseen during fit encode as the all-zeros block.
struct ColumnEncoding {
    std::string column;
    bool numeric = true;
    std::vector<std::string> levels;  // levels[0] is the reference
};

struct EncodingMap {
    std::vector<ColumnEncoding> entries;
    std::vector<std::string> feature_names;  // one per design column
    std::vector<double> center_offsets;      // empty when centering is off
    std::size_t width() const { return feature_names.size(); }
};

EncodingMap build_encoding(const Dataset& ds,
                           const std::vector<std::string>& feature_cols,
                           const std::vector<int>& fit_rows, bool center);

// Re-encode any row set with a previously built map. unseen_levels, when
// given, is incremented once per (row, column) whose level was not in the map.
Eigen::MatrixXd encode_rows(const Dataset& ds, const EncodingMap& map,
                            const std::vector<int>& rows,
                            long* unseen_levels = nullptr);

}  // namespace wam

#endif
