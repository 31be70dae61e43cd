// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

GridRule GridRule::range(std::string feature, double lo, double hi, double step) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && std::isfinite(step))) {
        fail(ErrorKind::InvalidArgument, "grid rule '" + feature + "' has non-finite bounds");
    }
    if (lo > hi) {
        fail(ErrorKind::InvalidArgument, "grid rule '" + feature + "' has lo > hi");
    }
    if (!(step > 0.0)) {
        fail(ErrorKind::InvalidArgument, "grid rule '" + feature + "' needs a positive step");
    }
    const double steps = (hi - lo) / step;
    const double whole = std::round(steps);
    if (std::abs(steps - whole) > 1e-9 * std::max(1.0, whole)) {
        fail(ErrorKind::InvalidArgument, "grid rule '" + feature + "': (hi - lo) is not a multiple of step");
    }
    GridRule r;
    r.feature_ = std::move(feature);
    r.lo_ = lo;
    r.hi_ = hi;
    r.step_ = step;
    r.count_ = static_cast<std::size_t>(whole) + 1;
    return r;
}

GridRule GridRule::enumerated(std::string feature, std::vector<double> values) {
    if (values.empty()) {
        fail(ErrorKind::InvalidArgument, "grid rule '" + feature + "' has an empty value set");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::InvalidArgument, "grid rule '" + feature + "' has a non-finite value");
        }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    GridRule r;
    r.feature_ = std::move(feature);
    r.lo_ = values.front();
    r.hi_ = values.back();
    r.count_ = values.size();
    r.values_ = std::move(values);
    return r;
}

double GridRule::value_at(std::size_t index) const {
    if (index >= count_) {
        fail(ErrorKind::InvalidArgument, "grid index out of range for '" + feature_ + "'");
    }
    if (!values_.empty()) {
        return values_[index];
    }
    return index + 1 == count_ ? hi_ : lo_ + static_cast<double>(index) * step_;
}

std::optional<std::size_t> GridRule::index_of(double v) const {
    if (!values_.empty()) {
        const auto it = std::lower_bound(values_.begin(), values_.end(), v);
        if (it != values_.end() && *it == v) {
            return static_cast<std::size_t>(it - values_.begin());
        }
        return std::nullopt;
    }
    if (!std::isfinite(v) || v < lo_ || v > hi_) {
        return std::nullopt;
    }
    const double k = std::round((v - lo_) / step_);
    if (k < 0.0 || k >= static_cast<double>(count_)) {
        return std::nullopt;
    }
    const auto idx = static_cast<std::size_t>(k);
    if (value_at(idx) != v) {
        return std::nullopt;
    }
    return idx;
}

std::size_t GridRule::snap(double v) const {
    if (std::isnan(v)) {
        fail(ErrorKind::InvalidArgument, "cannot snap NaN onto '" + feature_ + "'");
    }
    if (v <= lo_) {
        return 0;
    }
    if (v >= hi_) {
        return count_ - 1;
    }
    if (!values_.empty()) {
        const auto it = std::lower_bound(values_.begin(), values_.end(), v);
        const auto hi_idx = static_cast<std::size_t>(it - values_.begin());
        const std::size_t lo_idx = hi_idx - 1;
        return (v - values_[lo_idx]) <= (values_[hi_idx] - v) ? lo_idx : hi_idx;
    }
    const double pos = (v - lo_) / step_;
    const auto below = static_cast<std::size_t>(std::floor(pos));
    if (below + 1 >= count_) {
        return count_ - 1;
    }
    return (v - value_at(below)) <= (value_at(below + 1) - v) ? below : below + 1;
}

std::vector<std::string> GridConstraintSet::features() const {
    std::vector<std::string> out;
    out.reserve(rules.size());
    for (const auto& r : rules) {
        out.push_back(r.feature());
    }
    return out;
}

const GridRule& GridConstraintSet::rule(const std::string& feature) const {
    for (const auto& r : rules) {
        if (r.feature() == feature) {
            return r;
        }
    }
    fail(ErrorKind::Schema, "no grid rule for feature '" + feature + "'");
}

GridConstraintSet parse_grid_constraints(const std::string& json_text) {
    GridConstraintSet c;
    try {
        const auto j = nlohmann::json::parse(json_text);
        c.name = j.value("name", std::string{});
        std::set<std::string> seen;
        for (const auto& r : j.at("rules")) {
            auto feature = r.at("feature").get<std::string>();
            if (!seen.insert(feature).second) {
                fail(ErrorKind::Schema, "duplicate grid rule for '" + feature + "'");
            }
            if (r.contains("values")) {
                c.rules.push_back(GridRule::enumerated(std::move(feature), r.at("values").get<std::vector<double>>()));
            } else {
                const auto bounds = r.at("range").get<std::vector<double>>();
                if (bounds.size() != 2) {
                    fail(ErrorKind::Schema, "grid rule '" + feature + "' range must have two values");
                }
                c.rules.push_back(GridRule::range(std::move(feature), bounds[0], bounds[1], r.at("step").get<double>()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Schema, std::string("malformed constraint document: ") + e.what());
    }
    if (c.rules.empty()) {
        fail(ErrorKind::Schema, "constraint document has no rules");
    }
    return c;
}

GridConstraintSet load_grid_constraints(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open constraint file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grid_constraints(buf.str());
}

DesignConfig make_config(const GridConstraintSet& c, std::vector<std::size_t> index) {
    require(index.size() == c.rules.size(), "config index count differs from the rule count");
    DesignConfig out;
    out.values.reserve(index.size());
    for (std::size_t k = 0; k < index.size(); ++k) {
        out.values.push_back(c.rules[k].value_at(index[k]));
    }
    out.index = std::move(index);
    return out;
}

bool is_valid_config(const GridConstraintSet& c, const DesignConfig& config) {
    if (config.index.size() != c.rules.size() || config.values.size() != c.rules.size()) {
        return false;
    }
    for (std::size_t k = 0; k < c.rules.size(); ++k) {
        if (config.index[k] >= c.rules[k].size() || c.rules[k].value_at(config.index[k]) != config.values[k]) {
            return false;
        }
    }
    return true;
}

bool on_lattice(const GridConstraintSet& c, const std::vector<double>& values) {
    if (values.size() != c.rules.size()) {
        return false;
    }
    for (std::size_t k = 0; k < c.rules.size(); ++k) {
        if (!c.rules[k].index_of(values[k])) {
            return false;
        }
    }
    return true;
}

std::vector<DesignConfig> sample_configs(const GridConstraintSet& c, std::size_t n, std::uint64_t seed) {
    for (const auto& r : c.rules) {
        if (r.size() == 0) {
            fail(ErrorKind::InvalidArgument, "grid rule '" + r.feature() + "' admits no values");
        }
    }
    std::vector<DesignConfig> out;
    out.reserve(n);
    const std::uint64_t stream = derive_seed(seed, "sample");
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_seed(stream, i));
        std::vector<std::size_t> index(c.rules.size());
        for (std::size_t k = 0; k < c.rules.size(); ++k) {
            index[k] = static_cast<std::size_t>(rng.below(c.rules[k].size()));
        }
        out.push_back(make_config(c, std::move(index)));
    }
    return out;
}

} // namespace mlaudit
