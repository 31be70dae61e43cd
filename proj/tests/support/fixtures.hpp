// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlaudit/dataset.hpp"
#include "mlaudit/matrix.hpp"

namespace fixtures {

std::filesystem::path data_dir();

/// Column-synthetic stand-in with the rc_fire schema: every feature sits on the
/// shipped constraint lattice and the target follows the expected physical
/// directions plus gaussian noise.
mlaudit::Dataset synthetic_rc_fire(std::size_t n, std::uint64_t seed, double noise_sd = 10.0);
std::string to_csv(const mlaudit::Dataset& d);

/// y = intercept + sum coef_j x_j (+ noise), x ~ U(-2, 3).
mlaudit::Dataset linear_dataset(std::size_t n, const std::vector<double>& coef, double intercept,
                                std::uint64_t seed, double noise_sd = 0.0);

mlaudit::Dataset make_dataset(const mlaudit::Matrix& X, const std::vector<double>& y,
                              std::vector<std::string> names = {});

/// Isotropic gaussian blobs, `per` points each, labels returned alongside.
mlaudit::Matrix blobs(const std::vector<std::vector<double>>& centers, std::size_t per, double sd,
                      std::uint64_t seed, std::vector<std::size_t>* labels = nullptr);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& text) const;

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

} // namespace fixtures
