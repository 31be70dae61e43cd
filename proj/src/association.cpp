// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"

namespace mlaudit {

namespace {

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

} // namespace

HealthReport health_check(std::size_t n_rows, std::size_t n_features) {
    if (n_features == 0) {
        fail(ErrorKind::Domain, "health check needs at least one feature");
    }
    HealthReport r;
    r.n_rows = n_rows;
    r.n_features = n_features;
    r.obs_per_feature = static_cast<double>(n_rows) / static_cast<double>(n_features);
    r.pass_vansmeden_10 = r.obs_per_feature >= 10.0;
    r.pass_riley_23 = r.obs_per_feature >= 23.0;
    r.pass_ratio_3 = r.obs_per_feature >= 3.0;
    r.pass_ratio_5 = r.obs_per_feature >= 5.0;
    return r;
}

HealthReport health_check(const Dataset& d) {
    return health_check(d.n_rows(), d.n_features());
}

double pearson(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "pearson: length mismatch");
    require(x.size() >= 2, "pearson: need at least two values");
    if (is_constant(x) || is_constant(y)) {
        return 0.0;
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        return 0.0;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    return pearson(rx, ry);
}

namespace {

std::vector<std::size_t> equal_frequency_bins(std::span<const double> x, std::size_t bins) {
    const auto ranks = fractional_ranks(x);
    const double n = static_cast<double>(x.size());
    std::vector<std::size_t> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto b = static_cast<std::size_t>(std::floor((ranks[i] - 1.0) * static_cast<double>(bins) / n));
        out[i] = std::min(b, bins - 1);
    }
    return out;
}

} // namespace

double mutual_information(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "mutual_information: length mismatch");
    require(!x.empty(), "mutual_information: empty input");
    const std::size_t n = x.size();
    const std::size_t bins =
        std::min<std::size_t>(16, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
    const auto bx = equal_frequency_bins(x, bins);
    const auto by = equal_frequency_bins(y, bins);

    std::vector<double> joint(bins * bins, 0.0);
    std::vector<double> px(bins, 0.0);
    std::vector<double> py(bins, 0.0);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        joint[bx[i] * bins + by[i]] += w;
        px[bx[i]] += w;
        py[by[i]] += w;
    }
    double mi = 0.0;
    for (std::size_t a = 0; a < bins; ++a) {
        for (std::size_t b = 0; b < bins; ++b) {
            const double pab = joint[a * bins + b];
            if (pab > 0.0) {
                mi += pab * std::log(pab / (px[a] * py[b]));
            }
        }
    }
    return std::max(0.0, mi);
}

AssociationReport association_matrices(const Dataset& d) {
    require(d.n_rows() >= 3, "association matrices need at least 3 rows");
    const std::size_t m = d.n_features() + 1;
    std::vector<std::vector<double>> cols;
    AssociationReport r;
    for (std::size_t j = 0; j < m; ++j) {
        cols.push_back(d.column(j));
        r.columns.push_back(j < d.n_features() ? d.features()[j].name : d.target().name);
        r.degenerate.push_back(is_constant(cols.back()));
    }
    std::vector<std::vector<double>> ranks;
    for (const auto& c : cols) {
        ranks.push_back(fractional_ranks(c));
    }
    r.pearson = Matrix(m, m);
    r.spearman = Matrix(m, m);
    r.mutual_info = Matrix(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        r.pearson(a, a) = 1.0;
        r.spearman(a, a) = 1.0;
        r.mutual_info(a, a) = mutual_information(cols[a], cols[a]);
        for (std::size_t b = a + 1; b < m; ++b) {
            const double p = pearson(cols[a], cols[b]);
            const double s = pearson(ranks[a], ranks[b]);
            const double mi = mutual_information(cols[a], cols[b]);
            r.pearson(a, b) = r.pearson(b, a) = p;
            r.spearman(a, b) = r.spearman(b, a) = s;
            r.mutual_info(a, b) = r.mutual_info(b, a) = mi;
        }
    }
    return r;
}

} // namespace mlaudit
