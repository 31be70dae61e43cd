// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

enum class AttributionMethod { Gini, Permutation, Shap, Lime };

constexpr const char* to_string(AttributionMethod m) noexcept {
    switch (m) {
    case AttributionMethod::Gini: return "gini";
    case AttributionMethod::Permutation: return "permutation";
    case AttributionMethod::Shap: return "shap";
    case AttributionMethod::Lime: return "lime";
    }
    return "unknown";
}

struct Attribution {
    std::vector<std::string> features;
    std::vector<double> values;
    std::optional<double> base_value;
    std::vector<double> coefficients;  // LIME local slopes in original units, empty otherwise
    AttributionMethod method = AttributionMethod::Shap;
    bool normalized = false;
    bool flagged = false;  // set when a numerical fallback was used
    std::string note;
};

} // namespace mlaudit
