// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <span>

namespace mlaudit {

struct MetricReport {
    double mae = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Test-to-prediction ratio statistics (mean and sample coefficient of variation of A/P).
struct RatioStats {
    double mean_ratio = 0.0;
    double cov = 0.0;
};

double mae(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);
/// 1 - SS_res/SS_tot. Throws a degenerate error when `actual` is constant.
double r_squared(std::span<const double> actual, std::span<const double> predicted);
RatioStats ratio_stats(std::span<const double> actual, std::span<const double> predicted);

MetricReport evaluate_metrics(std::span<const double> actual, std::span<const double> predicted);

} // namespace mlaudit
