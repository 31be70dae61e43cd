// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlaudit/matrix.hpp"

namespace mlaudit {

class Dataset;
class SplitMix64;

enum class ModelKind { Tree, Forest, Knn, Linear, Ridge };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

/// Model family plus hyperparameters. Recognised keys and defaults:
///   tree:   max_depth (0 = unlimited), min_leaf = 2
///   forest: n_trees = 200, features_per_split (0 = ceil(p/3)), bootstrap = 1,
///           max_depth = 0, min_leaf = 2
///   knn:    k = 5
///   ridge:  lambda = 1
struct ModelSpec {
    ModelKind kind = ModelKind::Forest;
    std::map<std::string, double> hyperparams;
    std::uint64_t seed = 42;

    [[nodiscard]] double get(const std::string& key) const;
    /// Throws on unknown keys or out-of-range values.
    void validate() const;
};

/// Per-feature z-score parameters taken from the training data.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<bool> zero_variance;

    static Scaler fit(const Matrix& X);
    [[nodiscard]] Matrix transform(const Matrix& X) const;
    void transform_row(std::span<const double> x, std::span<double> out) const;
};

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // standardized units; z <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;      // node mean
    double gain = 0.0;       // SSE reduction of the split
    std::size_t samples = 0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    [[nodiscard]] double predict(std::span<const double> z) const;
    [[nodiscard]] std::size_t leaf_count() const;
};

struct TreeParams {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_leaf = 2;
    std::size_t features_per_split = 0;  // 0 = all features
};

/// CART regression tree on variance reduction. Thresholds are midpoints
/// between consecutive distinct values; ties prefer the lowest feature index,
/// then the lowest threshold. `rng` is only used when a feature subset is drawn.
RegressionTree grow_tree(const Matrix& Z, std::span<const double> y, std::vector<std::size_t> rows,
                         const TreeParams& params, SplitMix64* rng);

struct LinearCoefficients {
    std::vector<double> coef;  // original feature units
    double intercept = 0.0;
};

class TrainedModel {
public:
    [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] ModelKind kind() const noexcept { return spec_.kind; }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return features_; }
    [[nodiscard]] std::size_t n_features() const noexcept { return features_.size(); }
    [[nodiscard]] const Scaler& scaler() const noexcept { return scaler_; }
    [[nodiscard]] double target_min() const noexcept { return y_min_; }
    [[nodiscard]] double target_max() const noexcept { return y_max_; }
    /// Up to 64 training rows (original units), used as explanation background.
    [[nodiscard]] const Matrix& background() const noexcept { return background_; }

    [[nodiscard]] std::vector<double> predict(const Matrix& X) const;
    [[nodiscard]] double predict_row(std::span<const double> x) const;

    [[nodiscard]] const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    /// Only for linear and ridge models.
    [[nodiscard]] std::optional<LinearCoefficients> linear_coefficients() const;

    [[nodiscard]] std::string to_json() const;
    static TrainedModel from_json(const std::string& text);

    friend TrainedModel fit(const ModelSpec&, const Matrix&, std::span<const double>, std::vector<std::string>);

private:
    [[nodiscard]] double predict_standardized(std::span<const double> z) const;

    ModelSpec spec_;
    std::vector<std::string> features_;
    Scaler scaler_;
    double y_min_ = 0.0;
    double y_max_ = 0.0;
    Matrix background_;

    std::vector<RegressionTree> trees_;  // tree, forest
    Matrix knn_z_;                        // knn
    std::vector<double> knn_y_;
    std::size_t knn_k_ = 0;
    std::vector<double> coef_;            // linear, ridge (standardized units)
    double intercept_ = 0.0;
};

/// Fits on z-scored features (training statistics). Feature names default to x0..x{p-1}.
TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y,
                 std::vector<std::string> feature_names = {});
TrainedModel fit(const ModelSpec& spec, const Dataset& d);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace mlaudit
