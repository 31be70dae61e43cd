// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mlaudit/grid.hpp"
#include "mlaudit/matrix.hpp"
#include "mlaudit/model.hpp"

namespace mlaudit {

class Dataset;

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iterations = 300;
};

struct Clustering {
    std::size_t k = 0;
    Matrix centroids;           // standardized units
    Matrix centroids_original;  // original units
    std::vector<std::size_t> labels;
    double inertia = 0.0;       // standardized units
    std::size_t iterations = 0;
    std::size_t restart = 0;            // winning restart
    std::vector<double> inertia_trace;  // winning restart, one value per Lloyd iteration
    Scaler scaler;
};

/// k-means++ seeding and Lloyd iterations on z-scored features, best of
/// `restarts` runs by inertia (ties go to the earlier restart).
Clustering kmeans(const Matrix& X, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

/// Mean silhouette on z-scored features. Points alone in their cluster score 0.
double silhouette(const Matrix& X, const std::vector<std::size_t>& labels);

struct KDiagnostic {
    std::size_t k = 0;
    double silhouette = 0.0;
    double inertia = 0.0;
};

struct KSelection {
    std::size_t k = 0;
    std::vector<KDiagnostic> table;
    Clustering best;
};

/// Largest silhouette over [k_min, k_max]; ties go to the smaller k.
KSelection select_k(const Matrix& X, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                    const KMeansOptions& options = {});

struct ClusterProfile {
    std::size_t cluster = 0;
    std::size_t count = 0;
    std::vector<std::string> features;
    std::vector<double> means;        // original units
    std::vector<double> feature_std;  // whole-dataset standard deviation per feature
    double target_mean = 0.0;
};

struct ClusterCharacterization {
    std::vector<ClusterProfile> profiles;
    std::vector<double> global_means;
    double global_target_mean = 0.0;
    /// Per feature, the cluster whose mean deviates most from the global mean
    /// (relative to the feature's standard deviation; ties go to the lower cluster).
    std::vector<std::size_t> dominant_cluster;
};

/// `c` must have been computed on `d`'s feature matrix (rows in order).
ClusterCharacterization characterize_clusters(const Dataset& d, const Clustering& c);

/// Gaussian noise with std = scale * feature_std around the profile means,
/// snapped onto the constraint lattice (clamped to its bounds).
std::vector<DesignConfig> perturb_around_centroid(const ClusterProfile& profile, const GridConstraintSet& constraints,
                                                  std::size_t n, double scale, std::uint64_t seed);

} // namespace mlaudit
