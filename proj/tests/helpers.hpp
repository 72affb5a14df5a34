#ifndef WAM_TEST_HELPERS_HPP
#define WAM_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "wam/dataset.hpp"

namespace testutil {

inline wam::Column num_col(const std::string& name, std::vector<double> values) {
    wam::Column c;
    c.name = name;
    c.is_numeric = true;
    c.values = std::move(values);
    return c;
}

inline wam::Column cat_col(const std::string& name, const std::vector<std::string>& labels) {
    wam::Column c;
    c.name = name;
    c.is_numeric = false;
    for (const auto& lab : labels) {
        int code = -1;
        for (std::size_t l = 0; l < c.levels.size(); ++l)
            if (c.levels[l] == lab) code = static_cast<int>(l);
        if (code < 0) {
            code = static_cast<int>(c.levels.size());
            c.levels.push_back(lab);
        }
        c.codes.push_back(code);
    }
    return c;
}

inline wam::Dataset make_dataset(std::vector<wam::Column> cols) {
    wam::Dataset ds;
    ds.n_rows = cols.empty() ? 0 : cols[0].size();
    ds.columns = std::move(cols);
    return ds;
}

inline std::string write_temp_csv(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

// Per-group Gaussian features with linear outcomes; the ground truth for
// consistency and coverage checks.
struct SynthSpec {
    Eigen::MatrixXd group_means;   // s x p
    Eigen::MatrixXd group_betas;   // s x p
    Eigen::VectorXd intercepts;    // s
    double noise_sd = 1.0;
    int n_per_group = 500;
};

inline double true_nu(const SynthSpec& spec, int i, int j) {
    return spec.intercepts(j) + spec.group_betas.row(j).dot(spec.group_means.row(i));
}

inline wam::Dataset gen_linear(const SynthSpec& spec, std::uint64_t seed,
                               wam::GroupIndex* gi_out = nullptr) {
    const int s = static_cast<int>(spec.group_means.rows());
    const int p = static_cast<int>(spec.group_means.cols());
    const int n = spec.n_per_group;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<wam::Column> cols(static_cast<std::size_t>(p) + 2);
    for (int c = 0; c < p; ++c) {
        cols[c].name = "x" + std::to_string(c);
        cols[c].is_numeric = true;
    }
    wam::Column& ycol = cols[p];
    ycol.name = "y";
    ycol.is_numeric = true;
    wam::Column& gcol = cols[p + 1];
    gcol.name = "g";
    gcol.is_numeric = false;
    for (int g = 0; g < s; ++g) gcol.levels.push_back("g" + std::to_string(g));

    wam::GroupIndex gi;
    gi.labels = gcol.levels;
    gi.rows.resize(s);
    int row = 0;
    for (int g = 0; g < s; ++g) {
        for (int k = 0; k < n; ++k, ++row) {
            double y = spec.intercepts(g);
            for (int c = 0; c < p; ++c) {
                double x = spec.group_means(g, c) + gauss(rng);
                cols[c].values.push_back(x);
                y += spec.group_betas(g, c) * x;
            }
            ycol.values.push_back(y + spec.noise_sd * gauss(rng));
            gcol.codes.push_back(g);
            gi.rows[g].push_back(row);
        }
    }
    if (gi_out) *gi_out = gi;
    return make_dataset(std::move(cols));
}

// A default 2-group spec used across the inference checks.
inline SynthSpec default_synth(int n_per_group) {
    SynthSpec spec;
    spec.group_means.resize(2, 2);
    spec.group_means << 1.0, -0.5, -1.0, 2.0;
    spec.group_betas.resize(2, 2);
    spec.group_betas << 2.0, 1.0, -1.0, 0.5;
    spec.intercepts.resize(2);
    spec.intercepts << 0.5, -0.25;
    spec.noise_sd = 1.0;
    spec.n_per_group = n_per_group;
    return spec;
}

}  // namespace testutil

#endif
