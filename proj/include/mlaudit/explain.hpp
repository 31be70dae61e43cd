// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlaudit/attribution.hpp"
#include "mlaudit/matrix.hpp"
#include "mlaudit/model.hpp"

namespace mlaudit {

/// Anything the explainers can query. TrainedModel converts via black_box().
struct BlackBox {
    std::vector<std::string> features;
    std::function<std::vector<double>(const Matrix&)> predict;
    Matrix background;                // original units
    std::vector<double> feature_std;  // LIME perturbation scale per feature
};

BlackBox black_box(const TrainedModel& m);

struct ExplainConfig {
    Matrix background;               // empty: use the model's own background sample
    std::size_t n_coalitions = 2048;  // all 2^p - 2 coalitions are used when they fit
    std::size_t lime_n_samples = 1000;
    double lime_kernel_width = 0.0;  // 0: 0.75 * sqrt(p)
    std::uint64_t seed = 42;

    void validate(std::size_t n_features) const;
};

/// Kernel SHAP with the efficiency constraint solved exactly. Missing features
/// take background values (at most 64 background rows are used).
Attribution kernel_shap(const BlackBox& f, std::span<const double> x, const ExplainConfig& cfg);
Attribution kernel_shap(const TrainedModel& m, std::span<const double> x, const ExplainConfig& cfg);

/// Gaussian-kernel weighted linear fit on perturbed samples around `x`;
/// value_i = coef_i * (x_i - background mean_i).
Attribution lime_explain(const BlackBox& f, std::span<const double> x, const ExplainConfig& cfg);
Attribution lime_explain(const TrainedModel& m, std::span<const double> x, const ExplainConfig& cfg);

/// Divides by the largest magnitude. Throws on an all-zero attribution.
Attribution normalize_attribution(const Attribution& a);

struct FeatureDisagreement {
    std::string feature;
    double shap = 0.0;
    double lime = 0.0;
    bool opposed = false;
};

struct DisagreementReport {
    std::vector<FeatureDisagreement> per_feature;
    std::size_t count = 0;
    double epsilon = 0.05;
};

constexpr double kDefaultDisagreementEpsilon = 0.05;

DisagreementReport rashomon_disagreement(const Attribution& shap_n, const Attribution& lime_n,
                                         double epsilon = kDefaultDisagreementEpsilon);

/// Expected sign (-1, 0, +1) per feature name.
using PhysicsExpectation = std::vector<std::pair<std::string, int>>;

PhysicsExpectation load_physics_expectation(const std::filesystem::path& path);

struct PhysicsViolation {
    std::string feature;
    int expected_sign = 0;
    double value = 0.0;
};

std::vector<PhysicsViolation> physics_consistency(const Attribution& a, const PhysicsExpectation& expect,
                                                  double epsilon = kDefaultDisagreementEpsilon);

} // namespace mlaudit
