// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

struct Run {
    Matrix centroids;
    std::vector<std::size_t> labels;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

std::size_t nearest(const Matrix& C, std::span<const double> z, double* dist) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < C.rows(); ++c) {
        const double d = sq_dist(C.row(c), z);
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    if (dist != nullptr) {
        *dist = bd;
    }
    return best;
}

Matrix plus_plus(const Matrix& Z, std::size_t k, SplitMix64& rng) {
    const std::size_t n = Z.rows();
    Matrix C(k, Z.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    for (std::size_t c = 0; c < k; ++c) {
        std::copy(Z.row(pick).begin(), Z.row(pick).end(), C.row(c).begin());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(Z.row(i), C.row(c)));
            total += d2[i];
        }
        if (c + 1 == k) {
            break;
        }
        if (total > 0.0) {
            double u = rng.uniform() * total;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                if (u < d2[i]) {
                    pick = i;
                    break;
                }
                u -= d2[i];
            }
            // Never reuse a point at distance zero when a positive one exists.
            if (d2[pick] == 0.0) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(n));
        }
    }
    return C;
}

Run lloyd(const Matrix& Z, std::size_t k, SplitMix64& rng, std::size_t max_iterations) {
    const std::size_t n = Z.rows();
    const std::size_t p = Z.cols();
    Run run;
    run.centroids = plus_plus(Z, k, rng);
    run.labels.assign(n, k);
    std::vector<double> dist(n);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = nearest(run.centroids, Z.row(i), &dist[i]);
            if (c != run.labels[i]) {
                run.labels[i] = c;
                changed = true;
            }
        }
        // Reseed empty clusters with the point farthest from its centroid.
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t l : run.labels) {
            ++counts[l];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (dist[i] > dist[far] && counts[run.labels[i]] > 1) {
                    far = i;
                }
            }
            if (counts[run.labels[far]] <= 1) {
                continue;
            }
            --counts[run.labels[far]];
            run.labels[far] = c;
            counts[c] = 1;
            dist[far] = 0.0;
            changed = true;
        }
        if (!changed && it > 0) {
            break;
        }
        Matrix next(k, p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = next.row(run.labels[i]);
            auto z = Z.row(i);
            for (std::size_t j = 0; j < p; ++j) {
                row[j] += z[j];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                std::copy(run.centroids.row(c).begin(), run.centroids.row(c).end(), next.row(c).begin());
                continue;
            }
            for (double& v : next.row(c)) {
                v /= static_cast<double>(counts[c]);
            }
        }
        run.centroids = std::move(next);
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += sq_dist(Z.row(i), run.centroids.row(run.labels[i]));
        }
        run.trace.push_back(inertia);
        run.inertia = inertia;
        run.iterations = it + 1;
    }
    return run;
}

std::vector<double> feature_std(const Matrix& X) {
    const Scaler s = Scaler::fit(X);
    std::vector<double> out(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        out[j] = s.zero_variance[j] ? 0.0 : s.scale[j];
    }
    return out;
}

} // namespace

Clustering kmeans(const Matrix& X, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = X.rows();
    require(k >= 1, "kmeans needs k >= 1");
    if (k > n) {
        fail(ErrorKind::InvalidArgument, "kmeans: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
    }
    require(options.restarts >= 1 && options.max_iterations >= 1, "kmeans needs at least one restart and iteration");
    Clustering best;
    best.scaler = Scaler::fit(X);
    const Matrix Z = best.scaler.transform(X);
    bool have = false;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        SplitMix64 rng(derive_seed(seed, r));
        Run run = lloyd(Z, k, rng, options.max_iterations);
        if (!have || run.inertia < best.inertia) {
            have = true;
            best.centroids = std::move(run.centroids);
            best.labels = std::move(run.labels);
            best.inertia = run.inertia;
            best.iterations = run.iterations;
            best.inertia_trace = std::move(run.trace);
            best.restart = r;
        }
    }
    best.k = k;
    best.centroids_original = Matrix(k, X.cols());
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            best.centroids_original(c, j) =
                best.scaler.zero_variance[j] ? best.scaler.mean[j]
                                             : best.centroids(c, j) * best.scaler.scale[j] + best.scaler.mean[j];
        }
    }
    return best;
}

double silhouette(const Matrix& X, const std::vector<std::size_t>& labels) {
    const std::size_t n = X.rows();
    require(labels.size() == n, "silhouette: label count differs from row count");
    const std::set<std::size_t> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) {
        fail(ErrorKind::InvalidArgument, "silhouette needs at least two clusters");
    }
    const std::size_t k = *distinct.rbegin() + 1;
    const Matrix Z = Scaler::fit(X).transform(X);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : labels) {
        ++counts[l];
    }
    double total = 0.0;
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            if (m != i) {
                sums[labels[m]] += std::sqrt(sq_dist(Z.row(i), Z.row(m)));
            }
        }
        const std::size_t own = labels[i];
        if (counts[own] <= 1) {
            continue;
        }
        const double a = sums[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own && counts[c] > 0) {
                b = std::min(b, sums[c] / static_cast<double>(counts[c]));
            }
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

KSelection select_k(const Matrix& X, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                    const KMeansOptions& options) {
    require(k_min >= 2 && k_min <= k_max, "select_k needs 2 <= k_min <= k_max");
    require(X.rows() >= 1 && k_max <= X.rows() - 1, "select_k needs k_max <= n - 1");
    KSelection out;
    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_max; ++k) {
        Clustering c = kmeans(X, k, derive_seed(seed, k), options);
        const std::set<std::size_t> distinct(c.labels.begin(), c.labels.end());
        const double s = distinct.size() >= 2 ? silhouette(X, c.labels) : -1.0;
        out.table.push_back({k, s, c.inertia});
        if (s > best_s) {
            best_s = s;
            out.k = k;
            out.best = std::move(c);
        }
    }
    return out;
}

ClusterCharacterization characterize_clusters(const Dataset& d, const Clustering& c) {
    const std::size_t n = d.n_rows();
    const std::size_t p = d.n_features();
    require(c.labels.size() == n, "cluster labels do not match the dataset rows");
    require(n > 0, "cannot characterize an empty dataset");
    ClusterCharacterization out;
    const Matrix X = d.feature_matrix();
    const std::vector<double> stdev = feature_std(X);
    out.global_means.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            out.global_means[j] += X(i, j);
        }
        out.global_target_mean += d.target_value(i);
    }
    for (double& v : out.global_means) {
        v /= static_cast<double>(n);
    }
    out.global_target_mean /= static_cast<double>(n);

    const std::size_t k = std::max(c.k, *std::max_element(c.labels.begin(), c.labels.end()) + 1);
    out.profiles.resize(k);
    for (std::size_t cl = 0; cl < k; ++cl) {
        auto& pr = out.profiles[cl];
        pr.cluster = cl;
        pr.features = d.feature_names();
        pr.means.assign(p, 0.0);
        pr.feature_std = stdev;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& pr = out.profiles[c.labels[i]];
        ++pr.count;
        for (std::size_t j = 0; j < p; ++j) {
            pr.means[j] += X(i, j);
        }
        pr.target_mean += d.target_value(i);
    }
    for (auto& pr : out.profiles) {
        if (pr.count == 0) {
            continue;
        }
        for (double& v : pr.means) {
            v /= static_cast<double>(pr.count);
        }
        pr.target_mean /= static_cast<double>(pr.count);
    }
    out.dominant_cluster.assign(p, 0);
    for (std::size_t j = 0; j < p; ++j) {
        double best = -1.0;
        for (const auto& pr : out.profiles) {
            if (pr.count == 0) {
                continue;
            }
            const double dev = std::abs(pr.means[j] - out.global_means[j]) / (stdev[j] > 0.0 ? stdev[j] : 1.0);
            if (dev > best) {
                best = dev;
                out.dominant_cluster[j] = pr.cluster;
            }
        }
    }
    return out;
}

std::vector<DesignConfig> perturb_around_centroid(const ClusterProfile& profile, const GridConstraintSet& constraints,
                                                  std::size_t n, double scale, std::uint64_t seed) {
    if (!(scale > 0.0 && scale <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "perturbation scale must lie in (0, 1]");
    }
    // Map each rule to the profile's feature column.
    std::vector<std::size_t> column;
    for (const auto& rule : constraints.rules) {
        const auto it = std::find(profile.features.begin(), profile.features.end(), rule.feature());
        if (it == profile.features.end()) {
            fail(ErrorKind::Schema, "cluster profile has no feature '" + rule.feature() + "'");
        }
        column.push_back(static_cast<std::size_t>(it - profile.features.begin()));
    }
    std::vector<DesignConfig> out;
    out.reserve(n);
    const std::uint64_t stream = derive_seed(seed, "perturb");
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_seed(stream, i));
        std::vector<std::size_t> index(constraints.rules.size());
        for (std::size_t k = 0; k < constraints.rules.size(); ++k) {
            const std::size_t j = column[k];
            const double v = profile.means[j] + scale * profile.feature_std[j] * rng.normal();
            index[k] = constraints.rules[k].snap(v);
        }
        out.push_back(make_config(constraints, std::move(index)));
    }
    return out;
}

} // namespace mlaudit
