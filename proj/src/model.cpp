// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

using nlohmann::json;

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::Tree: return "tree";
    case ModelKind::Forest: return "forest";
    case ModelKind::Knn: return "knn";
    case ModelKind::Linear: return "linear";
    case ModelKind::Ridge: return "ridge";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
    for (auto k : {ModelKind::Tree, ModelKind::Forest, ModelKind::Knn, ModelKind::Linear, ModelKind::Ridge}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

namespace {

const std::map<std::string, double>& defaults_for(ModelKind kind) {
    static const std::map<std::string, double> tree{{"max_depth", 0.0}, {"min_leaf", 2.0}};
    static const std::map<std::string, double> forest{{"n_trees", 200.0},
                                                      {"features_per_split", 0.0},
                                                      {"bootstrap", 1.0},
                                                      {"max_depth", 0.0},
                                                      {"min_leaf", 2.0}};
    static const std::map<std::string, double> knn{{"k", 5.0}};
    static const std::map<std::string, double> linear{};
    static const std::map<std::string, double> ridge{{"lambda", 1.0}};
    switch (kind) {
    case ModelKind::Tree: return tree;
    case ModelKind::Forest: return forest;
    case ModelKind::Knn: return knn;
    case ModelKind::Linear: return linear;
    case ModelKind::Ridge: return ridge;
    }
    return linear;
}

bool is_whole(double v) { return std::floor(v) == v; }

} // namespace

double ModelSpec::get(const std::string& key) const {
    if (auto it = hyperparams.find(key); it != hyperparams.end()) {
        return it->second;
    }
    const auto& d = defaults_for(kind);
    if (auto it = d.find(key); it != d.end()) {
        return it->second;
    }
    fail(ErrorKind::InvalidArgument, "hyperparameter '" + key + "' does not apply to " + std::string(to_string(kind)));
}

void ModelSpec::validate() const {
    const auto& d = defaults_for(kind);
    for (const auto& [key, value] : hyperparams) {
        if (!d.contains(key)) {
            fail(ErrorKind::InvalidArgument,
                 "unknown hyperparameter '" + key + "' for " + std::string(to_string(kind)));
        }
        if (!std::isfinite(value) || value < 0.0) {
            fail(ErrorKind::InvalidArgument, "hyperparameter '" + key + "' must be a non-negative number");
        }
    }
    auto whole_at_least = [&](const char* key, double lo) {
        const double v = get(key);
        if (!is_whole(v) || v < lo) {
            fail(ErrorKind::InvalidArgument, std::string("hyperparameter '") + key + "' must be an integer >= " +
                                                 std::to_string(static_cast<int>(lo)));
        }
    };
    switch (kind) {
    case ModelKind::Forest:
        whole_at_least("n_trees", 1);
        whole_at_least("features_per_split", 0);
        whole_at_least("bootstrap", 0);
        [[fallthrough]];
    case ModelKind::Tree:
        whole_at_least("max_depth", 0);
        whole_at_least("min_leaf", 1);
        break;
    case ModelKind::Knn:
        whole_at_least("k", 1);
        break;
    case ModelKind::Ridge:
        if (!(get("lambda") > 0.0)) {
            fail(ErrorKind::InvalidArgument, "ridge lambda must be positive");
        }
        break;
    case ModelKind::Linear:
        break;
    }
}

// ---------------------------------------------------------------------------

Scaler Scaler::fit(const Matrix& X) {
    Scaler s;
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    s.mean.assign(p, 0.0);
    s.scale.assign(p, 1.0);
    s.zero_variance.assign(p, false);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m += X(i, j);
        }
        m /= static_cast<double>(n);
        double ss = 0.0;
        bool constant = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = X(i, j) - m;
            ss += d * d;
            constant = constant && X(i, j) == X(0, j);
        }
        s.mean[j] = m;
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (constant || !(sd > 0.0)) {
            s.zero_variance[j] = true;
            s.scale[j] = 1.0;
        } else {
            s.scale[j] = sd;
        }
    }
    return s;
}

void Scaler::transform_row(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = zero_variance[j] ? 0.0 : (x[j] - mean[j]) / scale[j];
    }
}

Matrix Scaler::transform(const Matrix& X) const {
    Matrix Z(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        transform_row(X.row(i), Z.row(i));
    }
    return Z;
}

// ---------------------------------------------------------------------------

double TrainedModel::predict_standardized(std::span<const double> z) const {
    switch (spec_.kind) {
    case ModelKind::Tree:
    case ModelKind::Forest: {
        double sum = 0.0;
        for (const auto& t : trees_) {
            sum += t.predict(z);
        }
        return sum / static_cast<double>(trees_.size());
    }
    case ModelKind::Knn: {
        const std::size_t n = knn_z_.rows();
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            auto row = knn_z_.row(i);
            for (std::size_t j = 0; j < z.size(); ++j) {
                const double t = row[j] - z[j];
                d += t * t;
            }
            dist[i] = {d, i};
        }
        const std::size_t k = std::min(knn_k_, n);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += knn_y_[dist[i].second];
        }
        return sum / static_cast<double>(k);
    }
    case ModelKind::Linear:
    case ModelKind::Ridge: {
        double v = intercept_;
        for (std::size_t j = 0; j < z.size(); ++j) {
            v += coef_[j] * z[j];
        }
        return v;
    }
    }
    return 0.0;
}

double TrainedModel::predict_row(std::span<const double> x) const {
    if (x.size() != n_features()) {
        fail(ErrorKind::InvalidArgument, "predict: expected " + std::to_string(n_features()) + " features, got " +
                                             std::to_string(x.size()));
    }
    std::vector<double> z(x.size());
    scaler_.transform_row(x, z);
    return predict_standardized(z);
}

std::vector<double> TrainedModel::predict(const Matrix& X) const {
    if (X.cols() != n_features() && X.rows() > 0) {
        fail(ErrorKind::InvalidArgument, "predict: expected " + std::to_string(n_features()) + " columns, got " +
                                             std::to_string(X.cols()));
    }
    std::vector<double> out(X.rows());
    std::vector<double> z(n_features());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        scaler_.transform_row(X.row(i), z);
        out[i] = predict_standardized(z);
    }
    return out;
}

std::optional<LinearCoefficients> TrainedModel::linear_coefficients() const {
    if (spec_.kind != ModelKind::Linear && spec_.kind != ModelKind::Ridge) {
        return std::nullopt;
    }
    LinearCoefficients c;
    c.intercept = intercept_;
    c.coef.resize(coef_.size());
    for (std::size_t j = 0; j < coef_.size(); ++j) {
        c.coef[j] = scaler_.zero_variance[j] ? 0.0 : coef_[j] / scaler_.scale[j];
        c.intercept -= c.coef[j] * (scaler_.zero_variance[j] ? 0.0 : scaler_.mean[j]);
    }
    return c;
}

// ---------------------------------------------------------------------------

namespace {

void fit_linear(const Matrix& Z, std::span<const double> y, double lambda, std::vector<double>& coef,
                double& intercept) {
    const auto n = static_cast<Eigen::Index>(Z.rows());
    const auto p = static_cast<Eigen::Index>(Z.cols());
    Eigen::MatrixXd A(n, p);
    Eigen::VectorXd b(n);
    Eigen::VectorXd zmean = Eigen::VectorXd::Zero(p);
    double ymean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            A(i, j) = Z(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            zmean(j) += A(i, j);
        }
        b(i) = y[static_cast<std::size_t>(i)];
        ymean += b(i);
    }
    zmean /= static_cast<double>(n);
    ymean /= static_cast<double>(n);
    A.rowwise() -= zmean.transpose();
    b.array() -= ymean;

    Eigen::VectorXd beta;
    if (lambda > 0.0) {
        Eigen::MatrixXd G = A.transpose() * A;
        G.diagonal().array() += lambda;
        beta = G.ldlt().solve(A.transpose() * b);
    } else {
        beta = A.completeOrthogonalDecomposition().solve(b);
    }
    coef.assign(beta.data(), beta.data() + p);
    intercept = ymean - zmean.dot(beta);
}

std::uint64_t as_u64(double v) { return static_cast<std::uint64_t>(v); }

} // namespace

TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y,
                 std::vector<std::string> feature_names) {
    spec.validate();
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    require(n >= 2, "fit needs at least 2 rows");
    require(p >= 1, "fit needs at least 1 feature");
    require(y.size() == n, "fit: target length differs from row count");
    for (double v : y) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::Validation, "fit: non-finite target value");
        }
    }
    for (double v : X.data()) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::Validation, "fit: non-finite feature value");
        }
    }
    if (feature_names.empty()) {
        for (std::size_t j = 0; j < p; ++j) {
            feature_names.push_back("x" + std::to_string(j));
        }
    }
    require(feature_names.size() == p, "fit: feature name count differs from column count");

    TrainedModel m;
    m.spec_ = spec;
    m.features_ = std::move(feature_names);
    m.scaler_ = Scaler::fit(X);
    m.y_min_ = *std::min_element(y.begin(), y.end());
    m.y_max_ = *std::max_element(y.begin(), y.end());

    {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        if (n > 64) {
            SplitMix64 rng(derive_seed(spec.seed, "background"));
            shuffle(std::span<std::size_t>(idx), rng);
            idx.resize(64);
            std::sort(idx.begin(), idx.end());
        }
        m.background_ = X.select_rows(idx);
    }

    const Matrix Z = m.scaler_.transform(X);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    switch (spec.kind) {
    case ModelKind::Tree: {
        TreeParams tp{as_u64(spec.get("max_depth")), as_u64(spec.get("min_leaf")), 0};
        m.trees_.push_back(grow_tree(Z, y, all, tp, nullptr));
        break;
    }
    case ModelKind::Forest: {
        const auto n_trees = as_u64(spec.get("n_trees"));
        auto mtry = as_u64(spec.get("features_per_split"));
        if (mtry == 0) {
            mtry = (p + 2) / 3;
        }
        require(mtry <= p, "features_per_split exceeds the feature count");
        TreeParams tp{as_u64(spec.get("max_depth")), as_u64(spec.get("min_leaf")), mtry};
        const bool bootstrap = spec.get("bootstrap") != 0.0;
        m.trees_.reserve(n_trees);
        for (std::uint64_t t = 0; t < n_trees; ++t) {
            SplitMix64 rng(derive_seed(spec.seed, t));
            std::vector<std::size_t> rows = all;
            if (bootstrap) {
                for (auto& r : rows) {
                    r = static_cast<std::size_t>(rng.below(n));
                }
            }
            m.trees_.push_back(grow_tree(Z, y, std::move(rows), tp, &rng));
        }
        break;
    }
    case ModelKind::Knn: {
        m.knn_k_ = as_u64(spec.get("k"));
        require(m.knn_k_ <= n, "knn: k exceeds the number of training rows");
        m.knn_z_ = Z;
        m.knn_y_.assign(y.begin(), y.end());
        break;
    }
    case ModelKind::Linear:
        fit_linear(Z, y, 0.0, m.coef_, m.intercept_);
        break;
    case ModelKind::Ridge:
        fit_linear(Z, y, spec.get("lambda"), m.coef_, m.intercept_);
        break;
    }
    return m;
}

TrainedModel fit(const ModelSpec& spec, const Dataset& d) {
    const auto y = d.targets();
    return fit(spec, d.feature_matrix(), y, d.feature_names());
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr int kModelSchemaVersion = 1;

json matrix_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from(const json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

} // namespace

std::string TrainedModel::to_json() const {
    json j;
    j["format"] = "mlaudit-model";
    j["schema_version"] = kModelSchemaVersion;
    j["spec"] = {{"kind", std::string(to_string(spec_.kind))}, {"hyperparams", spec_.hyperparams}, {"seed", spec_.seed}};
    j["features"] = features_;
    j["scaler"] = {{"mean", scaler_.mean}, {"scale", scaler_.scale}, {"zero_variance", scaler_.zero_variance}};
    j["target_range"] = {y_min_, y_max_};
    j["background"] = matrix_json(background_);
    switch (spec_.kind) {
    case ModelKind::Tree:
    case ModelKind::Forest: {
        json trees = json::array();
        for (const auto& t : trees_) {
            json jt;
            std::vector<int> feature;
            std::vector<int> left;
            std::vector<int> right;
            std::vector<double> threshold;
            std::vector<double> value;
            std::vector<double> gain;
            std::vector<std::size_t> samples;
            for (const auto& nd : t.nodes) {
                feature.push_back(nd.feature);
                left.push_back(nd.left);
                right.push_back(nd.right);
                threshold.push_back(nd.threshold);
                value.push_back(nd.value);
                gain.push_back(nd.gain);
                samples.push_back(nd.samples);
            }
            jt["feature"] = feature;
            jt["threshold"] = threshold;
            jt["left"] = left;
            jt["right"] = right;
            jt["value"] = value;
            jt["gain"] = gain;
            jt["samples"] = samples;
            trees.push_back(std::move(jt));
        }
        j["trees"] = std::move(trees);
        break;
    }
    case ModelKind::Knn:
        j["knn"] = {{"k", knn_k_}, {"z", matrix_json(knn_z_)}, {"y", knn_y_}};
        break;
    case ModelKind::Linear:
    case ModelKind::Ridge:
        j["linear"] = {{"coef", coef_}, {"intercept", intercept_}};
        break;
    }
    return j.dump();
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.value("format", std::string{}) != "mlaudit-model") {
            fail(ErrorKind::Schema, "not a model document");
        }
        if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
            fail(ErrorKind::Schema, "unsupported model schema_version");
        }
        TrainedModel m;
        m.spec_.kind = parse_model_kind(j.at("spec").at("kind").get<std::string>());
        m.spec_.hyperparams = j.at("spec").at("hyperparams").get<std::map<std::string, double>>();
        m.spec_.seed = j.at("spec").at("seed").get<std::uint64_t>();
        m.features_ = j.at("features").get<std::vector<std::string>>();
        m.scaler_.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        m.scaler_.scale = j.at("scaler").at("scale").get<std::vector<double>>();
        m.scaler_.zero_variance = j.at("scaler").at("zero_variance").get<std::vector<bool>>();
        m.y_min_ = j.at("target_range").at(0).get<double>();
        m.y_max_ = j.at("target_range").at(1).get<double>();
        m.background_ = matrix_from(j.at("background"));
        const std::size_t p = m.features_.size();
        if (m.scaler_.mean.size() != p || m.scaler_.scale.size() != p || m.scaler_.zero_variance.size() != p) {
            fail(ErrorKind::Schema, "model scaler size mismatch");
        }
        switch (m.spec_.kind) {
        case ModelKind::Tree:
        case ModelKind::Forest:
            for (const auto& jt : j.at("trees")) {
                RegressionTree t;
                const auto feature = jt.at("feature").get<std::vector<int>>();
                const auto threshold = jt.at("threshold").get<std::vector<double>>();
                const auto left = jt.at("left").get<std::vector<int>>();
                const auto right = jt.at("right").get<std::vector<int>>();
                const auto value = jt.at("value").get<std::vector<double>>();
                const auto gain = jt.at("gain").get<std::vector<double>>();
                const auto samples = jt.at("samples").get<std::vector<std::size_t>>();
                const auto count = static_cast<int>(feature.size());
                for (std::size_t i = 0; i < feature.size(); ++i) {
                    if (feature[i] >= static_cast<int>(p) ||
                        (feature[i] >= 0 && (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
                                             left[i] >= count || right[i] >= count))) {
                        fail(ErrorKind::Schema, "malformed tree node");
                    }
                    t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i], gain[i], samples[i]});
                }
                if (t.nodes.empty()) {
                    fail(ErrorKind::Schema, "empty tree");
                }
                m.trees_.push_back(std::move(t));
            }
            if (m.trees_.empty()) {
                fail(ErrorKind::Schema, "model has no trees");
            }
            break;
        case ModelKind::Knn:
            m.knn_k_ = j.at("knn").at("k").get<std::size_t>();
            m.knn_z_ = matrix_from(j.at("knn").at("z"));
            m.knn_y_ = j.at("knn").at("y").get<std::vector<double>>();
            break;
        case ModelKind::Linear:
        case ModelKind::Ridge:
            m.coef_ = j.at("linear").at("coef").get<std::vector<double>>();
            m.intercept_ = j.at("linear").at("intercept").get<double>();
            if (m.coef_.size() != p) {
                fail(ErrorKind::Schema, "model coefficient count mismatch");
            }
            break;
        }
        return m;
    } catch (const json::exception& e) {
        fail(ErrorKind::Schema, std::string("malformed model document: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorKind::Io, "cannot write model file " + path.string());
    }
    out << model.to_json() << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open model file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return TrainedModel::from_json(buf.str());
}

} // namespace mlaudit
