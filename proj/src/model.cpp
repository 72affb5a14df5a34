#include "wam/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "wam/errors.hpp"

namespace wam {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::linear: return "linear";
        case ModelKind::logistic: return "logistic";
        case ModelKind::knn: return "knn";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "linear") return ModelKind::linear;
    if (s == "logistic") return ModelKind::logistic;
    if (s == "knn") return ModelKind::knn;
    throw ConfigError("unknown model kind: " + s);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Columns constant over the fit rows carry no information and break the
// normal equations; callers drop them for linear/logistic.
std::vector<int> nonconstant_columns(const Eigen::MatrixXd& x) {
    std::vector<int> kept;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        double lo = x.col(c).minCoeff(), hi = x.col(c).maxCoeff();
        if (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) kept.push_back(static_cast<int>(c));
    }
    return kept;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<int>& kept) {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = x.col(kept[c]);
    return out;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd xt(x.rows(), x.cols() + 1);
    xt.col(0).setOnes();
    xt.rightCols(x.cols()) = x;
    return xt;
}

std::string collinear_report(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                             const FittedModel& m) {
    const auto rank = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index i = rank; i < perm.size(); ++i) {
        Eigen::Index orig = perm(i);
        std::string name = orig == 0 ? std::string("(intercept)")
                                     : m.encoding.feature_names[m.kept[orig - 1]];
        cols += (cols.empty() ? "" : ", ") + name;
    }
    return cols;
}

void fit_linear(FittedModel& m, const Eigen::MatrixXd& xk, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd xt = with_intercept(xk);
    const Eigen::Index n = xt.rows(), q = xt.cols();
    Eigen::VectorXd coef;
    Eigen::MatrixXd xtx_inv;
    if (m.spec.ridge_lambda > 0.0) {
        Eigen::MatrixXd xtx = xt.transpose() * xt;
        for (Eigen::Index c = 1; c < q; ++c) xtx(c, c) += m.spec.ridge_lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
        coef = ldlt.solve(xt.transpose() * y);
        xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xt);
        if (qr.rank() < q)
            throw FitError("rank-deficient design in group '" + m.fit_group +
                           "'; collinear columns: " + collinear_report(qr, m));
        coef = qr.solve(y);
        xtx_inv = (xt.transpose() * xt).ldlt().solve(Eigen::MatrixXd::Identity(q, q));
    }
    const Eigen::VectorXd resid = y - xt * coef;
    double rss = resid.squaredNorm();
    m.intercept = coef(0);
    m.beta = coef.tail(q - 1);
    m.sigma2 = rss / static_cast<double>(n - q);  // n - p - 1
    m.vcov_full = m.sigma2 * xtx_inv;
}

void fit_logistic(FittedModel& m, const Eigen::MatrixXd& xk, const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0.0 && y(i) != 1.0)
            throw FitError("logistic requires 0/1 outcome; found " + std::to_string(y(i)) +
                           " in group '" + m.fit_group + "'");
    const Eigen::MatrixXd xt = with_intercept(xk);
    const Eigen::Index q = xt.cols();
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(q);
    bool converged = false;
    for (int iter = 0; iter < m.spec.irls_max_iter; ++iter) {
        Eigen::VectorXd eta = xt * coef;
        Eigen::VectorXd p = eta.unaryExpr([](double z) { return sigmoid(z); });
        Eigen::VectorXd w = (p.array() * (1.0 - p.array())).cwiseMax(1e-10);
        Eigen::VectorXd z = eta + (y - p).cwiseQuotient(w);
        Eigen::VectorXd sw = w.cwiseSqrt();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * xt);
        if (qr.rank() < q)
            throw FitError("rank-deficient weighted design in group '" + m.fit_group +
                           "'; collinear columns: " + collinear_report(qr, m));
        Eigen::VectorXd next = qr.solve(sw.cwiseProduct(z));
        double step = (next - coef).cwiseAbs().maxCoeff();
        coef = next;
        if (coef.cwiseAbs().maxCoeff() > 1e6)
            throw FitError("logistic separation detected in group '" + m.fit_group +
                           "' (coefficients diverging)");
        if (step < m.spec.irls_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw FitError("IRLS did not converge in " + std::to_string(m.spec.irls_max_iter) +
                       " iterations for group '" + m.fit_group + "'");
    m.intercept = coef(0);
    m.beta = coef.tail(q - 1);
}

void fit_knn(FittedModel& m, const Eigen::MatrixXd& xk, const Eigen::VectorXd& y) {
    if (xk.rows() < m.spec.knn_k)
        throw FitError("knn: fit group '" + m.fit_group + "' has " +
                       std::to_string(xk.rows()) + " rows, fewer than k=" +
                       std::to_string(m.spec.knn_k));
    m.feat_mean = xk.colwise().mean();
    m.feat_sd.resize(xk.cols());
    for (Eigen::Index c = 0; c < xk.cols(); ++c) {
        double var = (xk.col(c).array() - m.feat_mean(c)).square().sum() /
                     std::max<double>(1.0, static_cast<double>(xk.rows() - 1));
        double sd = std::sqrt(var);
        m.feat_sd(c) = sd > 0.0 ? sd : 1.0;
    }
    if (m.spec.knn_standardize) {
        m.train_x = (xk.rowwise() - m.feat_mean.transpose()).array().rowwise() /
                    m.feat_sd.transpose().array();
    } else {
        m.train_x = xk;
    }
    m.train_y = y;
}

Eigen::VectorXd knn_predict(const FittedModel& m, const Eigen::MatrixXd& q) {
    const Eigen::Index nt = m.train_x.rows(), nq = q.rows(), p = q.cols();
    const int k = m.spec.knn_k;
    Eigen::VectorXd out(nq);
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(nt));
    std::vector<int> picked(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < nq; ++i) {
        for (Eigen::Index t = 0; t < nt; ++t) {
            double d = 0.0;
            for (Eigen::Index c = 0; c < p; ++c) {
                double diff = q(i, c) - m.train_x(t, c);
                d += diff * diff;
            }
            dist[t] = {d, static_cast<int>(t)};
        }
        // Ties in distance break toward the lower training-row index.
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        for (int j = 0; j < k; ++j) picked[j] = dist[j].second;
        std::sort(picked.begin(), picked.end());
        double sum = 0.0;
        for (int idx : picked) sum += m.train_y(idx);
        out(i) = sum / k;
    }
    return out;
}

}  // namespace

FittedModel fit(const ModelSpec& spec, const Dataset& ds,
                const std::vector<std::string>& feature_cols,
                const std::string& outcome_col, const std::vector<int>& fit_rows,
                const std::string& group_label) {
    if (spec.knn_k < 1) throw ConfigError("knn_k must be >= 1");
    if (spec.irls_tol <= 0) throw ConfigError("irls_tol must be > 0");
    if (spec.ridge_lambda < 0) throw ConfigError("ridge_lambda must be >= 0");

    FittedModel m;
    m.spec = spec;
    m.fit_group = group_label;
    m.n_fit = static_cast<Eigen::Index>(fit_rows.size());
    m.encoding = build_encoding(ds, feature_cols, fit_rows, /*center=*/false);

    Eigen::MatrixXd x = encode_rows(ds, m.encoding, fit_rows);
    const Column& ycol = ds.column(outcome_col);
    if (!ycol.is_numeric) throw DataError("outcome column '" + outcome_col + "' is not numeric");
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = ycol.values[fit_rows[i]];

    if (spec.kind == ModelKind::knn) {
        m.kept.resize(static_cast<std::size_t>(x.cols()));
        std::iota(m.kept.begin(), m.kept.end(), 0);
    } else {
        m.kept = nonconstant_columns(x);
        m.dropped_constant = static_cast<int>(x.cols()) - static_cast<int>(m.kept.size());
    }
    Eigen::MatrixXd xk = select_columns(x, m.kept);

    if (spec.kind != ModelKind::knn &&
        m.n_fit <= static_cast<Eigen::Index>(m.kept.size()) + 1)
        throw FitError("group '" + group_label + "': " + std::to_string(m.n_fit) +
                       " rows cannot identify " + std::to_string(m.kept.size() + 1) +
                       " coefficients");

    switch (spec.kind) {
        case ModelKind::linear: fit_linear(m, xk, y); break;
        case ModelKind::logistic: fit_logistic(m, xk, y); break;
        case ModelKind::knn: fit_knn(m, xk, y); break;
    }
    return m;
}

Eigen::VectorXd FittedModel::predict_encoded(const Eigen::MatrixXd& raw_rows) const {
    if (raw_rows.cols() != static_cast<Eigen::Index>(encoding.width()))
        throw DataError("predict: row width " + std::to_string(raw_rows.cols()) +
                        " does not match encoding width " + std::to_string(encoding.width()));
    Eigen::MatrixXd xk = select_columns(raw_rows, kept);
    switch (spec.kind) {
        case ModelKind::linear:
            return (xk * beta).array() + intercept;
        case ModelKind::logistic: {
            Eigen::VectorXd eta = (xk * beta).array() + intercept;
            return eta.unaryExpr([](double z) { return sigmoid(z); });
        }
        case ModelKind::knn: {
            if (spec.knn_standardize) {
                Eigen::MatrixXd qs = (xk.rowwise() - feat_mean.transpose()).array().rowwise() /
                                     feat_sd.transpose().array();
                return knn_predict(*this, qs);
            }
            return knn_predict(*this, xk);
        }
    }
    throw FitError("unreachable model kind");
}

Eigen::VectorXd predict(const FittedModel& model, const Dataset& ds,
                        const std::vector<int>& rows, long* unseen_levels) {
    Eigen::MatrixXd x = encode_rows(ds, model.encoding, rows, unseen_levels);
    return model.predict_encoded(x);
}

Eigen::MatrixXd coefficient_covariance(const FittedModel& model) {
    if (model.spec.kind != ModelKind::linear)
        throw ConfigError("coefficient_covariance requires a linear model");
    const Eigen::Index p = model.beta.size();
    return model.vcov_full.block(1, 1, p, p);
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json& rows) {
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c].get<double>();
    return m;
}

}  // namespace

std::string model_to_json(const FittedModel& m) {
    nlohmann::json j;
    j["spec"] = {{"kind", to_string(m.spec.kind)},
                 {"knn_k", m.spec.knn_k},
                 {"knn_standardize", m.spec.knn_standardize},
                 {"irls_max_iter", m.spec.irls_max_iter},
                 {"irls_tol", m.spec.irls_tol},
                 {"ridge_lambda", m.spec.ridge_lambda}};
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : m.encoding.entries)
        entries.push_back({{"column", e.column}, {"numeric", e.numeric}, {"levels", e.levels}});
    j["encoding"] = {{"entries", std::move(entries)},
                     {"feature_names", m.encoding.feature_names},
                     {"center_offsets", m.encoding.center_offsets}};
    j["kept"] = m.kept;
    j["fit_group"] = m.fit_group;
    j["n_fit"] = m.n_fit;
    j["dropped_constant"] = m.dropped_constant;
    j["intercept"] = m.intercept;
    j["beta"] = vec_to_json(m.beta);
    if (m.spec.kind == ModelKind::linear) {
        j["sigma2"] = m.sigma2;
        j["vcov_full"] = mat_to_json(m.vcov_full);
    }
    if (m.spec.kind == ModelKind::knn) {
        j["train_x"] = mat_to_json(m.train_x);
        j["train_y"] = vec_to_json(m.train_y);
        j["feat_mean"] = vec_to_json(m.feat_mean);
        j["feat_sd"] = vec_to_json(m.feat_sd);
    }
    return j.dump();
}

FittedModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    FittedModel m;
    m.spec.kind = model_kind_from_string(j["spec"]["kind"].get<std::string>());
    m.spec.knn_k = j["spec"]["knn_k"].get<int>();
    m.spec.knn_standardize = j["spec"]["knn_standardize"].get<bool>();
    m.spec.irls_max_iter = j["spec"]["irls_max_iter"].get<int>();
    m.spec.irls_tol = j["spec"]["irls_tol"].get<double>();
    m.spec.ridge_lambda = j["spec"]["ridge_lambda"].get<double>();
    for (const auto& e : j["encoding"]["entries"]) {
        ColumnEncoding ce;
        ce.column = e["column"].get<std::string>();
        ce.numeric = e["numeric"].get<bool>();
        ce.levels = e["levels"].get<std::vector<std::string>>();
        m.encoding.entries.push_back(std::move(ce));
    }
    m.encoding.feature_names = j["encoding"]["feature_names"].get<std::vector<std::string>>();
    m.encoding.center_offsets = j["encoding"]["center_offsets"].get<std::vector<double>>();
    m.kept = j["kept"].get<std::vector<int>>();
    m.fit_group = j["fit_group"].get<std::string>();
    m.n_fit = j["n_fit"].get<Eigen::Index>();
    m.dropped_constant = j["dropped_constant"].get<int>();
    m.intercept = j["intercept"].get<double>();
    m.beta = vec_from_json(j["beta"]);
    if (m.spec.kind == ModelKind::linear) {
        m.sigma2 = j["sigma2"].get<double>();
        m.vcov_full = mat_from_json(j["vcov_full"]);
    }
    if (m.spec.kind == ModelKind::knn) {
        m.train_x = mat_from_json(j["train_x"]);
        m.train_y = vec_from_json(j["train_y"]);
        m.feat_mean = vec_from_json(j["feat_mean"]);
        m.feat_sd = vec_from_json(j["feat_sd"]);
    }
    return m;
}

}  // namespace wam
