// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "mlaudit/rng.hpp"

#ifndef MLAUDIT_TEST_DATA_DIR
#define MLAUDIT_TEST_DATA_DIR "data"
#endif

namespace fixtures {

std::filesystem::path data_dir() { return MLAUDIT_TEST_DATA_DIR; }

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double pick(mlaudit::SplitMix64& rng, const std::vector<double>& values) {
    return values[rng.below(values.size())];
}

double lattice(mlaudit::SplitMix64& rng, double lo, double hi, double step) {
    const auto count = static_cast<std::uint64_t>((hi - lo) / step + 0.5) + 1;
    return lo + step * static_cast<double>(rng.below(count));
}

} // namespace

mlaudit::Dataset synthetic_rc_fire(std::size_t n, std::uint64_t seed, double noise_sd) {
    mlaudit::SplitMix64 rng(mlaudit::derive_seed(seed, "synthetic_rc_fire"));
    const auto schema = mlaudit::load_schema(data_dir() / "schemas" / "rc_fire.json");
    std::vector<double> rows;
    rows.reserve(n * 9);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = lattice(rng, 200, 600, 1);
        const double r = pick(rng, {1, 2, 3, 4});
        const double len = lattice(rng, 2000, 5000, 100);
        const double fc = pick(rng, {25, 30, 35, 40, 45, 50, 55, 60, 70, 80, 90, 100});
        const double fy = pick(rng, {280, 350, 400, 420, 450, 500});
        const double cover = lattice(rng, 20, 80, 5);
        const double ecc = lattice(rng, 0, 100, 5);
        const double load = lattice(rng, 500, 4000, 100);
        double fr = 60 + 0.35 * (w - 200) - 0.012 * (len - 2000) + 0.6 * (fc - 25) + 1.2 * (cover - 20) -
                    0.5 * ecc - 0.025 * (load - 500) + 4 * (r - 1) + noise_sd * rng.normal();
        fr = std::max(fr, 15.0);
        rows.insert(rows.end(), {w, r, len, fc, fy, cover, ecc, load, fr});
    }
    return {"rc_fire", schema.features, schema.target, std::move(rows)};
}

std::string to_csv(const mlaudit::Dataset& d) {
    std::ostringstream os;
    for (const auto& f : d.features()) {
        os << f.name << ',';
    }
    os << d.target().name << '\n';
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        for (std::size_t j = 0; j < d.n_features(); ++j) {
            os << fmt(d.feature(i, j)) << ',';
        }
        os << fmt(d.target_value(i)) << '\n';
    }
    return os.str();
}

mlaudit::Dataset make_dataset(const mlaudit::Matrix& X, const std::vector<double>& y, std::vector<std::string> names) {
    std::vector<mlaudit::FeatureSpec> features;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        features.push_back({j < names.size() ? names[j] : "x" + std::to_string(j), "", {}, {}});
    }
    std::vector<double> rows;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto r = X.row(i);
        rows.insert(rows.end(), r.begin(), r.end());
        rows.push_back(y[i]);
    }
    return {"synthetic", features, {"y", "", {}, {}}, std::move(rows)};
}

mlaudit::Dataset linear_dataset(std::size_t n, const std::vector<double>& coef, double intercept, std::uint64_t seed,
                                double noise_sd) {
    mlaudit::SplitMix64 rng(seed);
    mlaudit::Matrix X(n, coef.size());
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = intercept;
        for (std::size_t j = 0; j < coef.size(); ++j) {
            X(i, j) = rng.uniform(-2.0, 3.0);
            s += coef[j] * X(i, j);
        }
        y[i] = s + noise_sd * rng.normal();
    }
    return make_dataset(X, y);
}

mlaudit::Matrix blobs(const std::vector<std::vector<double>>& centers, std::size_t per, double sd,
                      std::uint64_t seed, std::vector<std::size_t>* labels) {
    mlaudit::SplitMix64 rng(seed);
    const std::size_t p = centers.front().size();
    mlaudit::Matrix X(centers.size() * per, p);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < per; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                X(c * per + i, j) = centers[c][j] + sd * rng.normal();
            }
            if (labels != nullptr) {
                labels->push_back(c);
            }
        }
    }
    return X;
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mlaudit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TempDir::write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    return p;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace fixtures
