// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlaudit/matrix.hpp"

namespace mlaudit {

enum class FeatureKind { Continuous, DiscreteGrid, CategoricalCoded };

struct FeatureSpec {
    std::string name;
    std::string unit;
    FeatureKind kind = FeatureKind::Continuous;
    std::vector<double> codes;  // permitted codes, categorical-coded only
};

struct Schema {
    std::string name;
    std::vector<FeatureSpec> features;
    FeatureSpec target;
};

/// Loads a schema document (see data/schemas/*.json).
Schema load_schema(const std::filesystem::path& path);

/// Named feature columns plus one target column, stored row-major with the
/// target as the last value of every row. Immutable once constructed.
class Dataset {
public:
    Dataset() = default;
    /// `rows` holds n*(p+1) values. Throws on non-finite values, duplicate or
    /// empty feature names, or a size mismatch.
    Dataset(std::string name, std::vector<FeatureSpec> features, FeatureSpec target,
            std::vector<double> rows);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<FeatureSpec>& features() const noexcept { return features_; }
    [[nodiscard]] const FeatureSpec& target() const noexcept { return target_; }
    [[nodiscard]] std::size_t n_rows() const noexcept { return n_rows_; }
    [[nodiscard]] std::size_t n_features() const noexcept { return features_.size(); }

    [[nodiscard]] double feature(std::size_t row, std::size_t col) const noexcept {
        return rows_[row * stride() + col];
    }
    [[nodiscard]] double target_value(std::size_t row) const noexcept {
        return rows_[row * stride() + n_features()];
    }

    [[nodiscard]] std::vector<std::string> feature_names() const;
    [[nodiscard]] std::optional<std::size_t> feature_index(const std::string& name) const;
    /// Index of `name` among features; throws a schema error when missing.
    [[nodiscard]] std::size_t require_feature(const std::string& name) const;

    [[nodiscard]] Matrix feature_matrix() const;
    [[nodiscard]] std::vector<double> targets() const;
    [[nodiscard]] std::vector<double> column(std::size_t col) const;

    [[nodiscard]] Dataset subset(std::span<const std::size_t> rows) const;
    [[nodiscard]] Dataset filter(const std::function<bool(const Dataset&, std::size_t)>& keep) const;
    [[nodiscard]] Dataset select_features(const std::vector<std::string>& names) const;
    [[nodiscard]] Dataset with_feature(FeatureSpec spec, std::span<const double> values) const;

private:
    [[nodiscard]] std::size_t stride() const noexcept { return features_.size() + 1; }

    std::string name_;
    std::vector<FeatureSpec> features_;
    FeatureSpec target_;
    std::size_t n_rows_ = 0;
    std::vector<double> rows_;
};

/// Reads comma-delimited text whose header names the schema's columns (extra
/// columns are ignored, order is free).
Dataset load_dataset(const std::filesystem::path& path, const Schema& schema);
Dataset parse_dataset(const std::string& text, const Schema& schema, std::string name = "dataset");

// ---------------------------------------------------------------------------
// Data health

struct HealthReport {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    double obs_per_feature = 0.0;
    bool pass_vansmeden_10 = false;
    bool pass_riley_23 = false;
    bool pass_ratio_3 = false;
    bool pass_ratio_5 = false;

    [[nodiscard]] bool all_pass() const noexcept {
        return pass_vansmeden_10 && pass_riley_23 && pass_ratio_3 && pass_ratio_5;
    }
};

HealthReport health_check(std::size_t n_rows, std::size_t n_features);
HealthReport health_check(const Dataset& d);

// ---------------------------------------------------------------------------
// Association matrices. Columns are the features followed by the target.

struct AssociationReport {
    std::vector<std::string> columns;
    Matrix pearson;
    Matrix spearman;
    Matrix mutual_info;
    std::vector<bool> degenerate;  // constant columns
};

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
/// Plug-in mutual information (nats) on equal-frequency bins,
/// ceil(sqrt(n)) bins capped at 16.
double mutual_information(std::span<const double> x, std::span<const double> y);
/// Fractional ranks (1-based, ties averaged).
std::vector<double> fractional_ranks(std::span<const double> x);

AssociationReport association_matrices(const Dataset& d);

// ---------------------------------------------------------------------------
// Splitting and folding

struct SplitRatios {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of_row;
    std::uint64_t seed = 0;

    [[nodiscard]] std::vector<std::size_t> fold_sizes() const;
};

SplitIndices split_dataset(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);
inline SplitIndices split_dataset(const Dataset& d, const SplitRatios& ratios, std::uint64_t seed) {
    return split_dataset(d.n_rows(), ratios, seed);
}

FoldAssignment kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

} // namespace mlaudit
