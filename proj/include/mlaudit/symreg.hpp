// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mlaudit/expression.hpp"
#include "mlaudit/matrix.hpp"

namespace mlaudit {

class Dataset;

struct GpConfig {
    std::size_t population = 500;
    std::size_t generations = 40;
    std::size_t max_nodes = 30;
    std::vector<Op> operators{Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow, Op::Sqrt, Op::Exp, Op::Log, Op::Abs};
    double crossover_rate = 0.7;
    double mutation_rate = 0.25;
    double parsimony = 1e-4;
    std::size_t init_max_depth = 4;
    std::size_t refine_iterations = 20;
    std::uint64_t seed = 42;

    void validate() const;
};

struct ArchiveEntry {
    ExpressionTree tree;
    std::size_t complexity = 0;
    double mse = 0.0;
};

/// Best expression per complexity level, with mse strictly decreasing as
/// complexity grows, so no entry is dominated by another.
class ParetoArchive {
public:
    /// Returns true when `tree` entered the archive.
    bool offer(const ExpressionTree& tree, double mse);

    [[nodiscard]] const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    /// Lowest-mse entry.
    [[nodiscard]] const ArchiveEntry& best() const;
    /// Checks ordering and non-domination.
    [[nodiscard]] bool consistent() const;

private:
    std::vector<ArchiveEntry> entries_;
};

double expression_mse(const ExpressionTree& t, const Matrix& X, std::span<const double> y);

using GpCallback = std::function<void(std::size_t generation, const ParetoArchive& archive)>;

ParetoArchive gp_search(const Matrix& X, std::span<const double> y, const GpConfig& cfg,
                        const GpCallback& on_generation = {});
ParetoArchive gp_search(const Dataset& d, const GpConfig& cfg, const GpCallback& on_generation = {});

} // namespace mlaudit
