// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "mlaudit/attribution.hpp"
#include "mlaudit/matrix.hpp"
#include "mlaudit/model.hpp"

namespace mlaudit {

/// Summed variance reduction per feature over every split of every tree,
/// normalized to sum to 1. Tree and forest models only.
Attribution gini_importance(const TrainedModel& m);

/// Mean increase in RMSE after shuffling one column, averaged over `repeats`.
Attribution permutation_importance(const TrainedModel& m, const Matrix& X, std::span<const double> y,
                                   std::size_t repeats, std::uint64_t seed);

} // namespace mlaudit
