// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include <cmath>
#include <numeric>

#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    shuffle(std::span<std::size_t>(idx), rng);
    return idx;
}

} // namespace

SplitIndices split_dataset(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
    require(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0,
            "split ratios must be positive");
    require(std::abs(ratios.train + ratios.validation + ratios.test - 1.0) <= 1e-9,
            "split ratios must sum to 1");

    const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.validation));
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.test));
    require(n_val + n_test <= n, "split ratios leave no training rows");
    const std::size_t n_train = n - n_val - n_test;
    if (n >= 3 && (n_train == 0 || n_val == 0 || n_test == 0)) {
        fail(ErrorKind::InvalidArgument, "split of " + std::to_string(n) + " rows leaves an empty set");
    }

    const auto idx = shuffled_indices(n, seed);
    SplitIndices s;
    s.seed = seed;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                        idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    return s;
}

FoldAssignment kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    require(k >= 2, "k-fold needs k >= 2");
    require(k <= n, "k-fold needs k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    const auto idx = shuffled_indices(n, seed);
    FoldAssignment f;
    f.k = k;
    f.seed = seed;
    f.fold_of_row.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.fold_of_row[idx[i]] = i % k;
    }
    return f;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : fold_of_row) {
        ++sizes[f];
    }
    return sizes;
}

} // namespace mlaudit
