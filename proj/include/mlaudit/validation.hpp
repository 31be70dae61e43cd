// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mlaudit/dataset.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/model.hpp"

namespace mlaudit {

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation over folds
};

struct CVReport {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<MetricReport> folds;
    MetricSummary mae;
    MetricSummary rmse;
    MetricSummary r2;
    MetricReport train;  // final model, in-sample on the pooled training and validation rows
    MetricReport test;   // final model on the held-out test rows
    SplitIndices split;
};

/// Splits with `ratios`, runs k-fold cross-validation on the pooled training
/// and validation rows, then refits on all of them and scores the test rows.
CVReport cross_validate(const ModelSpec& spec, const Dataset& d, std::size_t k, std::uint64_t seed,
                        const SplitRatios& ratios = {});

MetricSummary summarize(const std::vector<double>& values);

} // namespace mlaudit
