// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/importance.hpp"

#include <string>
#include <vector>

#include "mlaudit/error.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

Attribution gini_importance(const TrainedModel& m) {
    if (m.kind() != ModelKind::Tree && m.kind() != ModelKind::Forest) {
        fail(ErrorKind::Unsupported,
             "gini importance needs a tree or forest model, got " + std::string(to_string(m.kind())));
    }
    std::vector<double> total(m.n_features(), 0.0);
    for (const auto& tree : m.trees()) {
        for (const auto& node : tree.nodes) {
            if (node.feature >= 0) {
                total[static_cast<std::size_t>(node.feature)] += node.gain;
            }
        }
    }
    double sum = 0.0;
    for (double v : total) {
        sum += v;
    }
    Attribution a;
    a.features = m.feature_names();
    a.method = AttributionMethod::Gini;
    if (sum > 0.0) {
        for (double& v : total) {
            v /= sum;
        }
    } else {
        a.flagged = true;
        a.note = "model has no splits";
    }
    a.values = std::move(total);
    return a;
}

Attribution permutation_importance(const TrainedModel& m, const Matrix& X, std::span<const double> y,
                                   std::size_t repeats, std::uint64_t seed) {
    require(repeats >= 1, "permutation importance needs repeats >= 1");
    require(X.cols() == m.n_features(), "permutation importance: column count differs from the model");
    require(X.rows() == y.size() && !y.empty(), "permutation importance: row count mismatch or empty input");

    const double baseline = rmse(y, m.predict(X));
    Attribution a;
    a.features = m.feature_names();
    a.method = AttributionMethod::Permutation;
    a.values.assign(m.n_features(), 0.0);
    for (std::size_t j = 0; j < m.n_features(); ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) {
            SplitMix64 rng(derive_seed(derive_seed(seed, j), r));
            std::vector<double> col = X.column(j);
            shuffle(std::span<double>(col), rng);
            Matrix shuffled = X;
            for (std::size_t i = 0; i < X.rows(); ++i) {
                shuffled(i, j) = col[i];
            }
            acc += rmse(y, m.predict(shuffled)) - baseline;
        }
        a.values[j] = acc / static_cast<double>(repeats);
    }
    return a;
}

} // namespace mlaudit
