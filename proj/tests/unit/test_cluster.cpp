#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "mlaudit/cluster.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"
#include "oracles.hpp"

using namespace mlaudit;

namespace {

oracle::Rows rows_of(const Matrix& X) {
    oracle::Rows out;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out.emplace_back(X.row(i).begin(), X.row(i).end());
    }
    return out;
}

// Same partition up to relabelling.
bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if ((a[i] == a[j]) != (b[i] == b[j])) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

TEST_SUITE("cluster") {

TEST_CASE("four point example") {
    const Matrix X(4, 1, std::vector<double>{0, 1, 10, 11});
    const auto c = kmeans(X, 2, 1);
    CHECK(c.labels[0] == c.labels[1]);
    CHECK(c.labels[2] == c.labels[3]);
    CHECK(c.labels[0] != c.labels[2]);
    std::set<double> cents{c.centroids_original(0, 0), c.centroids_original(1, 0)};
    CHECK(*cents.begin() == doctest::Approx(0.5));
    CHECK(*cents.rbegin() == doctest::Approx(10.5));
    const double scale = std::sqrt((5.5 * 5.5 + 4.5 * 4.5 + 4.5 * 4.5 + 5.5 * 5.5) / 4.0);
    CHECK(c.inertia == doctest::Approx(4 * 0.25 / (scale * scale)));
}

TEST_CASE("k equal to n and duplicates") {
    const auto X = fixtures::blobs({{0, 0}, {5, 5}}, 10, 1.0, 3);
    const auto c = kmeans(X, X.rows(), 2);
    CHECK(c.inertia == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::set<std::size_t>(c.labels.begin(), c.labels.end()).size() == X.rows());
    CHECK_THROWS_AS((void)kmeans(X, X.rows() + 1, 2), Error);

    Matrix D(6, 2, std::vector<double>{1, 1, 1, 1, 1, 1, 9, 9, 9, 9, 9, 9});
    const auto cd = kmeans(D, 2, 4);
    CHECK(cd.labels[0] == cd.labels[1]);
    CHECK(cd.labels[1] == cd.labels[2]);
    CHECK(cd.labels[3] == cd.labels[5]);
    CHECK(cd.inertia == doctest::Approx(0.0));
}

TEST_CASE("inertia trace never increases and labels are reproducible") {
    const auto X = fixtures::blobs({{0, 0, 0}, {3, 1, 0}, {0, 4, 2}, {2, 2, 2}}, 60, 1.2, 8);
    const auto a = kmeans(X, 4, 17);
    const auto b = kmeans(X, 4, 17);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
    REQUIRE_FALSE(a.inertia_trace.empty());
    for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) {
        CHECK(a.inertia_trace[i] <= a.inertia_trace[i - 1] * (1 + 1e-12));
    }
    CHECK(a.inertia_trace.back() == doctest::Approx(a.inertia));
    for (std::size_t r = 1; r <= 10; ++r) {
        KMeansOptions o;
        o.restarts = r;
        CHECK(kmeans(X, 4, 17, o).inertia >= a.inertia - 1e-12);
    }
}

TEST_CASE("affine rescaling of columns leaves the partition unchanged") {
    const auto X = fixtures::blobs({{0, 0}, {4, 0}, {2, 3}}, 40, 0.8, 9);
    Matrix Y = X;
    for (std::size_t i = 0; i < Y.rows(); ++i) {
        Y(i, 0) = 1000.0 * Y(i, 0) + 7.0;
        Y(i, 1) = 0.01 * Y(i, 1) - 3.0;
    }
    const auto a = kmeans(X, 3, 5);
    const auto b = kmeans(Y, 3, 5);
    CHECK(same_partition(a.labels, b.labels));
    CHECK(a.inertia == doctest::Approx(b.inertia).epsilon(1e-9));
}

TEST_CASE("silhouette") {
    std::vector<std::size_t> truth;
    const auto X = fixtures::blobs({{0, 0}, {50, 0}, {0, 50}}, 30, 1.0, 2, &truth);
    CHECK(silhouette(X, truth) > 0.9);
    CHECK(silhouette(X, truth) == doctest::Approx(oracle::brute_silhouette(oracle::standardize(rows_of(X)), truth))
                                      .epsilon(1e-12));

    SplitMix64 rng(4);
    Matrix R(500, 2);
    std::vector<std::size_t> labels(500);
    for (std::size_t i = 0; i < 500; ++i) {
        R(i, 0) = rng.normal();
        R(i, 1) = rng.normal();
        labels[i] = rng.below(3);
    }
    CHECK(std::abs(silhouette(R, labels)) < 0.1);

    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 5 + rng.below(40);
        Matrix M(n, 3);
        std::vector<std::size_t> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                M(i, j) = rng.uniform(-3, 3);
            }
            l[i] = i < 2 ? i : rng.below(4);
        }
        const double s = silhouette(M, l);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        CHECK(s == doctest::Approx(oracle::brute_silhouette(oracle::standardize(rows_of(M)), l)).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)silhouette(X, std::vector<std::size_t>(X.rows(), 0)), Error);
}

TEST_CASE("select_k") {
    const auto X = fixtures::blobs({{0, 0}, {10, 0}, {5, 9}}, 40, 1.0, 6);
    const auto s = select_k(X, 2, 6, 1);
    CHECK(s.k == 3);
    REQUIRE(s.table.size() == 5);
    for (const auto& row : s.table) {
        CHECK(row.silhouette <= s.table[1].silhouette);
    }
    CHECK(s.best.k == 3);

    const auto fixed = select_k(X, 2, 2, 1);
    CHECK(fixed.k == 2);
    CHECK(fixed.table.size() == 1);
    CHECK_THROWS_AS((void)select_k(X, 1, 3, 1), Error);
    CHECK_THROWS_AS((void)select_k(X, 4, 3, 1), Error);
    CHECK_THROWS_AS((void)select_k(X, 2, X.rows(), 1), Error);
}

TEST_CASE("characterization") {
    std::vector<std::size_t> truth;
    const auto X = fixtures::blobs({{0, 0}, {0, 20}}, 50, 1.0, 12, &truth);
    std::vector<double> y(X.rows());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = X(i, 1) * 2.0;
    }
    const auto d = fixtures::make_dataset(X, y, {"a", "b"});

    Clustering one;
    one.k = 1;
    one.labels.assign(X.rows(), 0);
    const auto single = characterize_clusters(d, one);
    REQUIRE(single.profiles.size() == 1);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(single.profiles[0].means[j] == doctest::Approx(single.global_means[j]));
    }
    CHECK(single.profiles[0].target_mean == doctest::Approx(single.global_target_mean));

    const auto c = kmeans(X, 2, 3);
    const auto ch = characterize_clusters(d, c);
    REQUIRE(ch.profiles.size() == 2);
    CHECK(ch.profiles[0].count + ch.profiles[1].count == X.rows());
    const std::size_t high = ch.profiles[0].means[1] > ch.profiles[1].means[1] ? 0 : 1;
    CHECK(ch.profiles[high].means[1] == doctest::Approx(20).epsilon(0.05));
    CHECK(ch.profiles[high].target_mean == doctest::Approx(40).epsilon(0.05));

    const auto X3 = fixtures::blobs({{0, 0}, {0, 3}, {0, 30}}, 30, 0.5, 13);
    const auto d3 = fixtures::make_dataset(X3, std::vector<double>(X3.rows(), 1.0), {"a", "b"});
    const auto ch3 = characterize_clusters(d3, kmeans(X3, 3, 2));
    std::size_t far = 0;
    for (std::size_t k = 1; k < 3; ++k) {
        if (ch3.profiles[k].means[1] > ch3.profiles[far].means[1]) {
            far = k;
        }
    }
    CHECK(ch3.dominant_cluster[1] == far);
    double weighted = 0.0;
    for (const auto& p : ch.profiles) {
        weighted += p.means[0] * static_cast<double>(p.count);
    }
    CHECK(weighted / static_cast<double>(X.rows()) == doctest::Approx(ch.global_means[0]));
}

TEST_CASE("perturbation around a centroid") {
    const auto c = load_grid_constraints(fixtures::data_dir() / "constraints" / "rc_fire.json");
    ClusterProfile p;
    p.features = c.features();
    p.means = {312.4, 2.4, 3333, 41, 430, 37.4, 12.6, 1510};
    p.feature_std = {80, 1, 800, 15, 60, 10, 20, 600};

    const auto tight = perturb_around_centroid(p, c, 50, 1e-12, 3);
    for (const auto& cfg : tight) {
        CHECK(cfg.values == std::vector<double>{312, 2, 3300, 40, 420, 35, 15, 1500});
    }

    const auto wide = perturb_around_centroid(p, c, 2000, 1.0, 3);
    double sum_w = 0.0;
    for (const auto& cfg : wide) {
        REQUIRE(is_valid_config(c, cfg));
        sum_w += cfg.values[0];
    }
    CHECK(sum_w / 2000.0 == doctest::Approx(312.4).epsilon(0.02));

    const auto again = perturb_around_centroid(p, c, 10, 1.0, 3);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(again[i].index == wide[i].index);
    }
    CHECK_THROWS_AS((void)perturb_around_centroid(p, c, 5, 0.0, 3), Error);
    CHECK_THROWS_AS((void)perturb_around_centroid(p, c, 5, 1.5, 3), Error);
    p.features[0] = "other";
    CHECK_THROWS_AS((void)perturb_around_centroid(p, c, 5, 0.5, 3), Error);
}

}
