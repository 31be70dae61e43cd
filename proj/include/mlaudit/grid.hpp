// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit {

/// Permitted values of one design variable: either the lattice
/// lo, lo + step, ..., hi or an explicit value set. Values are addressed by
/// integer index so membership checks are exact.
class GridRule {
public:
    static GridRule range(std::string feature, double lo, double hi, double step);
    static GridRule enumerated(std::string feature, std::vector<double> values);

    [[nodiscard]] const std::string& feature() const noexcept { return feature_; }
    [[nodiscard]] bool is_range() const noexcept { return values_.empty(); }
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] std::size_t size() const noexcept { return count_; }
    [[nodiscard]] double value_at(std::size_t index) const;
    /// Index of `v` when it is exactly a permitted value.
    [[nodiscard]] std::optional<std::size_t> index_of(double v) const;
    /// Nearest permitted value (clamped to the bounds). Ties go to the lower index.
    [[nodiscard]] std::size_t snap(double v) const;

private:
    std::string feature_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double step_ = 0.0;
    std::size_t count_ = 0;
    std::vector<double> values_;  // enumerated rules only, ascending
};

struct GridConstraintSet {
    std::string name;
    std::vector<GridRule> rules;

    [[nodiscard]] std::vector<std::string> features() const;
    [[nodiscard]] const GridRule& rule(const std::string& feature) const;
};

/// Document layout: {"name": ..., "rules": [{"feature": f, "range": [lo, hi],
/// "step": s} | {"feature": f, "values": [...]}]}.
GridConstraintSet load_grid_constraints(const std::filesystem::path& path);
GridConstraintSet parse_grid_constraints(const std::string& json_text);

struct DesignConfig {
    std::vector<std::size_t> index;  // lattice index per rule
    std::vector<double> values;      // value_at(index), in rule order
};

DesignConfig make_config(const GridConstraintSet& c, std::vector<std::size_t> index);

/// Exact membership: every index is in range and every value is the lattice
/// value at that index.
bool is_valid_config(const GridConstraintSet& c, const DesignConfig& config);
/// Membership of raw values (no index needed).
bool on_lattice(const GridConstraintSet& c, const std::vector<double>& values);

/// Uniform over each rule's permitted values. Config i depends only on the
/// seed and on i, so growing n extends the same sequence.
std::vector<DesignConfig> sample_configs(const GridConstraintSet& c, std::size_t n, std::uint64_t seed);

} // namespace mlaudit
