// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

namespace {

constexpr std::size_t kMaxBackground = 64;

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

Matrix pick_background(const BlackBox& f, const ExplainConfig& cfg) {
    const Matrix& bg = cfg.background.rows() > 0 ? cfg.background : f.background;
    if (bg.rows() == 0) {
        fail(ErrorKind::InvalidArgument, "explanation background is empty");
    }
    if (bg.cols() != f.features.size()) {
        fail(ErrorKind::InvalidArgument, "explanation background has the wrong column count");
    }
    if (bg.rows() <= kMaxBackground) {
        return bg;
    }
    std::vector<std::size_t> idx(bg.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(cfg.seed, "background"));
    shuffle(std::span<std::size_t>(idx), rng);
    idx.resize(kMaxBackground);
    std::sort(idx.begin(), idx.end());
    return bg.select_rows(idx);
}

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            mean[j] += m(i, j);
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(m.rows());
    }
    return mean;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

void check_row(const BlackBox& f, std::span<const double> x) {
    if (x.size() != f.features.size()) {
        fail(ErrorKind::InvalidArgument, "explained row has " + std::to_string(x.size()) + " values, model has " +
                                             std::to_string(f.features.size()) + " features");
    }
}

} // namespace

BlackBox black_box(const TrainedModel& m) {
    BlackBox f;
    f.features = m.feature_names();
    f.predict = [&m](const Matrix& X) { return m.predict(X); };
    f.background = m.background();
    f.feature_std.resize(m.n_features());
    for (std::size_t j = 0; j < m.n_features(); ++j) {
        f.feature_std[j] = m.scaler().zero_variance[j] ? 0.0 : m.scaler().scale[j];
    }
    return f;
}

void ExplainConfig::validate(std::size_t n_features) const {
    if (n_coalitions < n_features + 2) {
        fail(ErrorKind::InvalidArgument, "n_coalitions must be at least p + 2");
    }
    if (lime_n_samples < 10 * n_features) {
        fail(ErrorKind::InvalidArgument, "lime_n_samples must be at least 10 * p");
    }
    if (lime_kernel_width < 0.0 || !std::isfinite(lime_kernel_width)) {
        fail(ErrorKind::InvalidArgument, "lime_kernel_width must be non-negative");
    }
}

// ---------------------------------------------------------------------------

Attribution kernel_shap(const BlackBox& f, std::span<const double> x, const ExplainConfig& cfg) {
    check_row(f, x);
    const std::size_t p = f.features.size();
    cfg.validate(p);
    const Matrix bg = pick_background(f, cfg);
    const std::size_t nb = bg.rows();

    auto value_of = [&](const std::vector<char>& mask) {
        Matrix rows = bg;
        for (std::size_t i = 0; i < nb; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                if (mask[j] != 0) {
                    rows(i, j) = x[j];
                }
            }
        }
        return mean_of(f.predict(rows));
    };

    const double base = mean_of(f.predict(bg));
    const double fx = f.predict(Matrix(1, p, std::vector<double>(x.begin(), x.end())))[0];
    const double delta = fx - base;

    Attribution a;
    a.features = f.features;
    a.method = AttributionMethod::Shap;
    a.base_value = base;
    if (p == 1) {
        a.values = {delta};
        return a;
    }

    // Coalition -> total kernel weight.
    std::map<std::vector<char>, double> coalitions;
    const bool enumerate = p < 31 && ((std::size_t{1} << p) - 2) <= cfg.n_coalitions;
    if (enumerate) {
        const std::size_t total = std::size_t{1} << p;
        for (std::size_t bits = 1; bits + 1 < total; ++bits) {
            std::vector<char> mask(p);
            std::size_t s = 0;
            for (std::size_t j = 0; j < p; ++j) {
                mask[j] = static_cast<char>((bits >> j) & 1U);
                s += static_cast<std::size_t>(mask[j]);
            }
            const double w = static_cast<double>(p - 1) /
                             (binomial(p, s) * static_cast<double>(s) * static_cast<double>(p - s));
            coalitions.emplace(std::move(mask), w);
        }
    } else {
        std::vector<double> cdf(p - 1);
        double acc = 0.0;
        for (std::size_t s = 1; s < p; ++s) {
            acc += 1.0 / (static_cast<double>(s) * static_cast<double>(p - s));
            cdf[s - 1] = acc;
        }
        SplitMix64 rng(derive_seed(cfg.seed, "shap"));
        std::vector<std::size_t> order(p);
        for (std::size_t draw = 0; draw < cfg.n_coalitions; ++draw) {
            const double u = rng.uniform() * acc;
            const auto s = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::vector<char> mask(p, 0);
            for (std::size_t i = 0; i < std::min(s, p - 1); ++i) {
                const auto j = i + static_cast<std::size_t>(rng.below(p - i));
                std::swap(order[i], order[j]);
                mask[order[i]] = 1;
            }
            coalitions[mask] += 1.0;
        }
    }

    // Eliminate the last attribution through the efficiency constraint.
    const auto rows = static_cast<Eigen::Index>(coalitions.size());
    const auto cols = static_cast<Eigen::Index>(p - 1);
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    Eigen::Index r = 0;
    for (const auto& [mask, w] : coalitions) {
        const double sw = std::sqrt(w);
        const double last = mask[p - 1];
        for (Eigen::Index j = 0; j < cols; ++j) {
            A(r, j) = sw * (mask[static_cast<std::size_t>(j)] - last);
        }
        b(r) = sw * (value_of(mask) - base - last * delta);
        ++r;
    }
    const Eigen::VectorXd phi = A.completeOrthogonalDecomposition().solve(b);
    a.values.assign(phi.data(), phi.data() + cols);
    a.values.push_back(delta - phi.sum());
    return a;
}

Attribution kernel_shap(const TrainedModel& m, std::span<const double> x, const ExplainConfig& cfg) {
    return kernel_shap(black_box(m), x, cfg);
}

// ---------------------------------------------------------------------------

Attribution lime_explain(const BlackBox& f, std::span<const double> x, const ExplainConfig& cfg) {
    check_row(f, x);
    const std::size_t p = f.features.size();
    cfg.validate(p);
    require(f.feature_std.size() == p, "lime: feature_std size differs from the feature count");
    const Matrix bg = pick_background(f, cfg);
    const std::vector<double> bg_mean = column_means(bg);
    const double width = cfg.lime_kernel_width > 0.0 ? cfg.lime_kernel_width : 0.75 * std::sqrt(static_cast<double>(p));

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < p; ++j) {
        if (f.feature_std[j] > 0.0) {
            active.push_back(j);
        }
    }

    const std::size_t n = cfg.lime_n_samples;
    SplitMix64 rng(derive_seed(cfg.seed, "lime"));
    Matrix Z(n, p, 0.0);
    Matrix samples(n, p);
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (std::size_t j : active) {
            // The first sample is the explained row itself.
            const double z = i == 0 ? 0.0 : rng.normal();
            Z(i, j) = z;
            d2 += z * z;
        }
        for (std::size_t j = 0; j < p; ++j) {
            samples(i, j) = x[j] + Z(i, j) * f.feature_std[j];
        }
        weight[i] = std::exp(-d2 / (width * width));
    }
    const std::vector<double> y = f.predict(samples);

    const auto cols = static_cast<Eigen::Index>(active.size() + 1);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double sw = std::sqrt(weight[i]);
        const auto ri = static_cast<Eigen::Index>(i);
        A(ri, 0) = sw;
        for (std::size_t k = 0; k < active.size(); ++k) {
            A(ri, static_cast<Eigen::Index>(k + 1)) = sw * Z(i, active[k]);
        }
        b(ri) = sw * y[i];
    }

    Attribution a;
    a.features = f.features;
    a.method = AttributionMethod::Lime;
    Eigen::VectorXd beta;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() == cols) {
        beta = qr.solve(b);
    } else {
        Eigen::MatrixXd G = A.transpose() * A;
        G.diagonal().array() += 1e-6;
        beta = G.ldlt().solve(A.transpose() * b);
        a.flagged = true;
        a.note = "singular weighted design, ridge fallback (lambda 1e-6)";
    }

    a.coefficients.assign(p, 0.0);
    a.values.assign(p, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const std::size_t j = active[k];
        a.coefficients[j] = beta(static_cast<Eigen::Index>(k + 1)) / f.feature_std[j];
        a.values[j] = a.coefficients[j] * (x[j] - bg_mean[j]);
    }
    return a;
}

Attribution lime_explain(const TrainedModel& m, std::span<const double> x, const ExplainConfig& cfg) {
    return lime_explain(black_box(m), x, cfg);
}

// ---------------------------------------------------------------------------

Attribution normalize_attribution(const Attribution& a) {
    double peak = 0.0;
    for (double v : a.values) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::Domain, "cannot normalize a non-finite attribution");
        }
        peak = std::max(peak, std::abs(v));
    }
    if (!(peak > 0.0)) {
        fail(ErrorKind::Degenerate, "cannot normalize an all-zero attribution");
    }
    Attribution out = a;
    for (double& v : out.values) {
        v /= peak;
    }
    // Exact unit magnitude at the peak regardless of rounding.
    for (std::size_t j = 0; j < a.values.size(); ++j) {
        if (std::abs(a.values[j]) == peak) {
            out.values[j] = a.values[j] > 0.0 ? 1.0 : -1.0;
        }
    }
    out.normalized = true;
    return out;
}

DisagreementReport rashomon_disagreement(const Attribution& shap_n, const Attribution& lime_n, double epsilon) {
    if (shap_n.values.size() != lime_n.values.size()) {
        fail(ErrorKind::InvalidArgument, "attributions have different feature counts");
    }
    require(epsilon >= 0.0, "epsilon must be non-negative");
    DisagreementReport r;
    r.epsilon = epsilon;
    for (std::size_t j = 0; j < shap_n.values.size(); ++j) {
        FeatureDisagreement fd;
        fd.feature = j < shap_n.features.size() ? shap_n.features[j] : "x" + std::to_string(j);
        fd.shap = shap_n.values[j];
        fd.lime = lime_n.values[j];
        fd.opposed = std::abs(fd.shap) > epsilon && std::abs(fd.lime) > epsilon && (fd.shap > 0.0) != (fd.lime > 0.0);
        r.count += fd.opposed ? 1U : 0U;
        r.per_feature.push_back(std::move(fd));
    }
    return r;
}

PhysicsExpectation load_physics_expectation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open expectation file " + path.string());
    }
    PhysicsExpectation out;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& [name, sign] : j.at("expectations").items()) {
            const int s = sign.get<int>();
            if (s < -1 || s > 1) {
                fail(ErrorKind::Schema, "expected sign for '" + name + "' must be -1, 0 or 1");
            }
            out.emplace_back(name, s);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Schema, "malformed expectation file " + path.string() + ": " + e.what());
    }
    return out;
}

std::vector<PhysicsViolation> physics_consistency(const Attribution& a, const PhysicsExpectation& expect,
                                                  double epsilon) {
    std::vector<PhysicsViolation> out;
    for (const auto& [name, sign] : expect) {
        if (sign < -1 || sign > 1) {
            fail(ErrorKind::InvalidArgument, "expected sign for '" + name + "' must be -1, 0 or 1");
        }
        const auto it = std::find(a.features.begin(), a.features.end(), name);
        if (it == a.features.end()) {
            fail(ErrorKind::InvalidArgument, "expectation names unknown feature '" + name + "'");
        }
        const double v = a.values[static_cast<std::size_t>(it - a.features.begin())];
        if (sign != 0 && std::abs(v) > epsilon && (v > 0.0 ? 1 : -1) != sign) {
            out.push_back({name, sign, v});
        }
    }
    return out;
}

} // namespace mlaudit
