// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mlaudit/attribution.hpp"
#include "mlaudit/explain.hpp"
#include "mlaudit/grid.hpp"
#include "mlaudit/model.hpp"

namespace mlaudit {

constexpr double kDefaultFrMax = 300.0;

/// 0 below the target, otherwise min(1, (predicted - target) / (fr_max - target)).
double feasibility_score(double predicted_fr, double target_fr, double fr_max = kDefaultFrMax);

struct ScreenResult {
    std::size_t source_index = 0;  // position in the screened list
    DesignConfig config;
    double predicted_fr = 0.0;
    double feasibility = 0.0;
    bool meets_target = false;  // predicted_fr >= target
};

struct ScreenOptions {
    double fr_max = kDefaultFrMax;
    std::string load_feature = "load_kn";    // first economy tie-break (lower first)
    std::string width_feature = "width_mm";  // second economy tie-break (lower first)
};

/// Scores every config and sorts by (meets_target desc, feasibility desc,
/// load asc, width asc, source index asc). The model's features must equal
/// the constraint set's features, in order.
std::vector<ScreenResult> screen_configs(const TrainedModel& m, const GridConstraintSet& constraints,
                                         const std::vector<DesignConfig>& configs, double target_fr,
                                         const ScreenOptions& options = {});

struct TopKReport {
    std::string status;  // "ok" or "empty-result"
    std::vector<ScreenResult> rows;
    std::optional<Attribution> best_attribution;
};

/// The first k results that meet the target, plus a Kernel SHAP attribution
/// for the best one. No qualifying result yields status "empty-result".
TopKReport top_k_report(const std::vector<ScreenResult>& results, std::size_t k, const TrainedModel& m,
                        const ExplainConfig& cfg);

} // namespace mlaudit
