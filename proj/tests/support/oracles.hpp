// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors
//
// Independent reference implementations used as test oracles. Nothing here
// calls into the library.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

double mae(const std::vector<double>& a, const std::vector<double>& p);
double rmse(const std::vector<double>& a, const std::vector<double>& p);
double r2(const std::vector<double>& a, const std::vector<double>& p);
/// {mean of a/p, sample std of a/p divided by the mean}
std::pair<double, double> ratio_stats(const std::vector<double>& a, const std::vector<double>& p);

/// Gaussian elimination with partial pivoting. A is n x n, row-major.
std::vector<double> solve(Rows A, std::vector<double> b);

/// Ordinary least squares through the normal equations; returns
/// {intercept, coef_1, ..., coef_p}.
std::vector<double> ols(const Rows& X, const std::vector<double>& y);

/// Exact interventional Shapley values of f at x against the background rows,
/// by enumerating every coalition.
std::vector<double> exact_shapley(const std::function<double(const std::vector<double>&)>& f,
                                  const std::vector<double>& x, const Rows& background);

/// Indices not dominated under (maximize r, minimize v), in index order.
std::vector<std::size_t> brute_pareto(const std::vector<double>& r, const std::vector<double>& v);

/// Silhouette by direct definition on already-standardized rows.
double brute_silhouette(const Rows& Z, const std::vector<std::size_t>& labels);

/// Population z-score per column (zero-variance columns become 0).
Rows standardize(const Rows& X);

} // namespace oracle
