#include "wam/encoding.hpp"

#include <algorithm>
#include <unordered_set>

#include "wam/errors.hpp"

namespace wam {

EncodingMap build_encoding(const Dataset& ds,
                           const std::vector<std::string>& feature_cols,
                           const std::vector<int>& fit_rows, bool center) {
    if (fit_rows.empty()) throw DataError("build_encoding: empty fit row set");
    EncodingMap map;
    for (const auto& name : feature_cols) {
        const Column& col = ds.column(name);
        ColumnEncoding e;
        e.column = name;
        e.numeric = col.is_numeric;
        if (col.is_numeric) {
            map.feature_names.push_back(name);
        } else {
            // Level order = first appearance within the fit rows.
            std::unordered_set<int> seen;
            for (int r : fit_rows) {
                int code = col.codes[r];
                if (seen.insert(code).second) e.levels.push_back(col.levels[code]);
            }
            for (std::size_t l = 1; l < e.levels.size(); ++l)
                map.feature_names.push_back(name + "=" + e.levels[l]);
        }
        map.entries.push_back(std::move(e));
    }
    if (center) {
        Eigen::MatrixXd x = encode_rows(ds, map, fit_rows);
        map.center_offsets.resize(map.width());
        for (std::size_t c = 0; c < map.width(); ++c)
            map.center_offsets[c] = x.col(static_cast<Eigen::Index>(c)).mean();
    }
    return map;
}

Eigen::MatrixXd encode_rows(const Dataset& ds, const EncodingMap& map,
                            const std::vector<int>& rows, long* unseen_levels) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(map.width()));
    x.setZero();
    Eigen::Index c0 = 0;
    for (const auto& e : map.entries) {
        const Column& col = ds.column(e.column);
        if (e.numeric != col.is_numeric)
            throw DataError("column type changed since encoding was built: " + e.column);
        if (e.numeric) {
            for (Eigen::Index i = 0; i < n; ++i) x(i, c0) = col.values[rows[i]];
            ++c0;
        } else {
            const auto block = static_cast<Eigen::Index>(e.levels.size()) - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                const std::string& lab = col.decode(rows[i]);
                auto it = std::find(e.levels.begin(), e.levels.end(), lab);
                if (it == e.levels.end()) {
                    if (unseen_levels) ++*unseen_levels;
                } else if (it != e.levels.begin()) {
                    x(i, c0 + (it - e.levels.begin()) - 1) = 1.0;
                }
            }
            c0 += block;
        }
    }
    if (!map.center_offsets.empty())
        for (Eigen::Index c = 0; c < x.cols(); ++c) x.col(c).array() -= map.center_offsets[c];
    return x;
}

}  // namespace wam
