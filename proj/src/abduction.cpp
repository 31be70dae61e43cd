// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/abduction.hpp"

#include <algorithm>
#include <cmath>

#include "mlaudit/error.hpp"

namespace mlaudit {

double feasibility_score(double predicted_fr, double target_fr, double fr_max) {
    if (!(fr_max > target_fr)) {
        fail(ErrorKind::InvalidArgument, "fr_max must exceed the target fire resistance");
    }
    if (predicted_fr < target_fr) {
        return 0.0;
    }
    return std::min(1.0, (predicted_fr - target_fr) / (fr_max - target_fr));
}

std::vector<ScreenResult> screen_configs(const TrainedModel& m, const GridConstraintSet& constraints,
                                         const std::vector<DesignConfig>& configs, double target_fr,
                                         const ScreenOptions& options) {
    if (m.feature_names() != constraints.features()) {
        fail(ErrorKind::Schema, "model features do not match the constraint set '" + constraints.name + "'");
    }
    const std::size_t p = m.n_features();
    Matrix X(configs.size(), p);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (configs[i].values.size() != p) {
            fail(ErrorKind::Schema, "config " + std::to_string(i) + " has the wrong number of values");
        }
        std::copy(configs[i].values.begin(), configs[i].values.end(), X.row(i).begin());
    }
    const std::vector<double> pred = m.predict(X);

    auto find = [&](const std::string& name) -> std::ptrdiff_t {
        const auto& names = m.feature_names();
        const auto it = std::find(names.begin(), names.end(), name);
        return it == names.end() ? -1 : it - names.begin();
    };
    const std::ptrdiff_t load = find(options.load_feature);
    const std::ptrdiff_t width = find(options.width_feature);

    std::vector<ScreenResult> out;
    out.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        ScreenResult r;
        r.source_index = i;
        r.config = configs[i];
        r.predicted_fr = pred[i];
        r.feasibility = feasibility_score(pred[i], target_fr, options.fr_max);
        r.meets_target = pred[i] >= target_fr;
        out.push_back(std::move(r));
    }
    auto value = [](const ScreenResult& r, std::ptrdiff_t j) {
        return j < 0 ? 0.0 : r.config.values[static_cast<std::size_t>(j)];
    };
    std::sort(out.begin(), out.end(), [&](const ScreenResult& a, const ScreenResult& b) {
        if (a.meets_target != b.meets_target) {
            return a.meets_target;
        }
        if (a.feasibility != b.feasibility) {
            return a.feasibility > b.feasibility;
        }
        if (value(a, load) != value(b, load)) {
            return value(a, load) < value(b, load);
        }
        if (value(a, width) != value(b, width)) {
            return value(a, width) < value(b, width);
        }
        return a.source_index < b.source_index;
    });
    return out;
}

TopKReport top_k_report(const std::vector<ScreenResult>& results, std::size_t k, const TrainedModel& m,
                        const ExplainConfig& cfg) {
    require(k >= 1, "top-k needs k >= 1");
    TopKReport report;
    for (const auto& r : results) {
        if (report.rows.size() >= k) {
            break;
        }
        if (r.meets_target) {
            report.rows.push_back(r);
        }
    }
    if (report.rows.empty()) {
        report.status = "empty-result";
        return report;
    }
    report.status = "ok";
    report.best_attribution = kernel_shap(m, report.rows.front().config.values, cfg);
    return report;
}

} // namespace mlaudit
