// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/metrics.hpp"

#include <cmath>
#include <string>

#include "mlaudit/error.hpp"

namespace mlaudit {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p) {
    require(a.size() == p.size(), "metric inputs differ in length (" + std::to_string(a.size()) + " vs " +
                                      std::to_string(p.size()) + ")");
    require(!a.empty(), "metric inputs are empty");
}

} // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        sum += std::abs(actual[i] - predicted[i]);
    }
    return sum / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    require(actual.size() >= 2, "r_squared needs at least two values");
    double mean = 0.0;
    for (double a : actual) {
        mean += a;
    }
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = predicted[i] - actual[i];
        const double d = actual[i] - mean;
        ss_res += e * e;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        fail(ErrorKind::Degenerate, "r_squared undefined: actual values are constant");
    }
    return 1.0 - ss_res / ss_tot;
}

RatioStats ratio_stats(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    const std::size_t n = actual.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (predicted[i] == 0.0) {
            fail(ErrorKind::Domain, "ratio_stats: predicted value is zero at row " + std::to_string(i));
        }
        sum += actual[i] / predicted[i];
    }
    RatioStats s;
    s.mean_ratio = sum / static_cast<double>(n);
    if (n < 2) {
        return s;
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = actual[i] / predicted[i] - s.mean_ratio;
        ss += d * d;
    }
    s.cov = std::sqrt(ss / static_cast<double>(n - 1)) / std::abs(s.mean_ratio);
    return s;
}

MetricReport evaluate_metrics(std::span<const double> actual, std::span<const double> predicted) {
    MetricReport m;
    m.mae = mae(actual, predicted);
    m.rmse = rmse(actual, predicted);
    m.r2 = r_squared(actual, predicted);
    m.n = actual.size();
    return m;
}

} // namespace mlaudit
