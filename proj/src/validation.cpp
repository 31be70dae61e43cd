// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/validation.hpp"

#include <cmath>

#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

MetricReport score(const TrainedModel& m, const Dataset& d) {
    const auto y = d.targets();
    return evaluate_metrics(y, m.predict(d.feature_matrix()));
}

} // namespace

CVReport cross_validate(const ModelSpec& spec, const Dataset& d, std::size_t k, std::uint64_t seed,
                        const SplitRatios& ratios) {
    spec.validate();
    CVReport report;
    report.k = k;
    report.seed = seed;
    report.split = split_dataset(d, ratios, derive_seed(seed, "split"));

    std::vector<std::size_t> pool = report.split.train;
    pool.insert(pool.end(), report.split.validation.begin(), report.split.validation.end());
    const FoldAssignment folds = kfold_indices(pool.size(), k, derive_seed(seed, "folds"));

    ModelSpec fold_spec = spec;
    std::vector<double> maes;
    std::vector<double> rmses;
    std::vector<double> r2s;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> fit_rows;
        std::vector<std::size_t> held_rows;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            (folds.fold_of_row[i] == f ? held_rows : fit_rows).push_back(pool[i]);
        }
        fold_spec.seed = derive_seed(spec.seed, f);
        const TrainedModel m = fit(fold_spec, d.subset(fit_rows));
        const MetricReport r = score(m, d.subset(held_rows));
        report.folds.push_back(r);
        maes.push_back(r.mae);
        rmses.push_back(r.rmse);
        r2s.push_back(r.r2);
    }
    report.mae = summarize(maes);
    report.rmse = summarize(rmses);
    report.r2 = summarize(r2s);

    const Dataset train = d.subset(pool);
    const TrainedModel final_model = fit(spec, train);
    report.train = score(final_model, train);
    report.test = score(final_model, d.subset(report.split.test));
    return report;
}

} // namespace mlaudit
