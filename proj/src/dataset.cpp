// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "mlaudit/error.hpp"

namespace mlaudit {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return cells;
}

FeatureKind parse_kind(const std::string& kind) {
    if (kind == "continuous") {
        return FeatureKind::Continuous;
    }
    if (kind == "discrete-grid") {
        return FeatureKind::DiscreteGrid;
    }
    if (kind == "categorical-coded") {
        return FeatureKind::CategoricalCoded;
    }
    fail(ErrorKind::Schema, "unknown feature kind '" + kind + "'");
}

FeatureSpec parse_feature(const nlohmann::json& j) {
    FeatureSpec f;
    f.name = j.at("name").get<std::string>();
    f.unit = j.value("unit", std::string{});
    f.kind = parse_kind(j.value("kind", std::string{"continuous"}));
    if (j.contains("codes")) {
        f.codes = j.at("codes").get<std::vector<double>>();
    }
    if (f.kind == FeatureKind::CategoricalCoded && f.codes.empty()) {
        fail(ErrorKind::Schema, "categorical feature '" + f.name + "' lists no codes");
    }
    return f;
}

} // namespace

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open schema file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
        Schema s;
        s.name = j.value("name", path.stem().string());
        for (const auto& f : j.at("features")) {
            s.features.push_back(parse_feature(f));
        }
        s.target = parse_feature(j.at("target"));
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Schema, "malformed schema " + path.string() + ": " + e.what());
    }
}

Dataset::Dataset(std::string name, std::vector<FeatureSpec> features, FeatureSpec target,
                 std::vector<double> rows)
    : name_(std::move(name)), features_(std::move(features)), target_(std::move(target)),
      rows_(std::move(rows)) {
    std::set<std::string> seen;
    for (const auto& f : features_) {
        if (f.name.empty()) {
            fail(ErrorKind::Schema, "feature names must be non-empty");
        }
        if (!seen.insert(f.name).second) {
            fail(ErrorKind::Schema, "duplicate feature name '" + f.name + "'");
        }
    }
    if (rows_.size() % stride() != 0) {
        fail(ErrorKind::Validation, "row buffer is not a multiple of the column count");
    }
    n_rows_ = rows_.size() / stride();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!std::isfinite(rows_[i])) {
            const std::size_t col = i % stride();
            const std::string& cname = col < features_.size() ? features_[col].name : target_.name;
            fail(ErrorKind::Validation, "non-finite value at row " + std::to_string(i / stride() + 1) +
                                            ", column '" + cname + "'");
        }
    }
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> names;
    names.reserve(features_.size());
    for (const auto& f : features_) {
        names.push_back(f.name);
    }
    return names;
}

std::optional<std::size_t> Dataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < features_.size(); ++j) {
        if (features_[j].name == name) {
            return j;
        }
    }
    return std::nullopt;
}

std::size_t Dataset::require_feature(const std::string& name) const {
    auto idx = feature_index(name);
    if (!idx) {
        fail(ErrorKind::Schema, "dataset '" + name_ + "' has no feature '" + name + "'");
    }
    return *idx;
}

Matrix Dataset::feature_matrix() const {
    Matrix X(n_rows_, n_features());
    for (std::size_t i = 0; i < n_rows_; ++i) {
        for (std::size_t j = 0; j < n_features(); ++j) {
            X(i, j) = feature(i, j);
        }
    }
    return X;
}

std::vector<double> Dataset::targets() const {
    std::vector<double> y(n_rows_);
    for (std::size_t i = 0; i < n_rows_; ++i) {
        y[i] = target_value(i);
    }
    return y;
}

std::vector<double> Dataset::column(std::size_t col) const {
    std::vector<double> out(n_rows_);
    for (std::size_t i = 0; i < n_rows_; ++i) {
        out[i] = rows_[i * stride() + col];
    }
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(rows.size() * stride());
    for (std::size_t r : rows) {
        require(r < n_rows_, "subset row index out of range");
        out.insert(out.end(), rows_.begin() + static_cast<std::ptrdiff_t>(r * stride()),
                   rows_.begin() + static_cast<std::ptrdiff_t>((r + 1) * stride()));
    }
    return Dataset(name_, features_, target_, std::move(out));
}

Dataset Dataset::filter(const std::function<bool(const Dataset&, std::size_t)>& keep) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n_rows_; ++i) {
        if (keep(*this, i)) {
            idx.push_back(i);
        }
    }
    return subset(idx);
}

Dataset Dataset::select_features(const std::vector<std::string>& names) const {
    std::vector<std::size_t> cols;
    std::vector<FeatureSpec> specs;
    for (const auto& n : names) {
        cols.push_back(require_feature(n));
        specs.push_back(features_[cols.back()]);
    }
    std::vector<double> out;
    out.reserve(n_rows_ * (cols.size() + 1));
    for (std::size_t i = 0; i < n_rows_; ++i) {
        for (std::size_t c : cols) {
            out.push_back(feature(i, c));
        }
        out.push_back(target_value(i));
    }
    return Dataset(name_, std::move(specs), target_, std::move(out));
}

Dataset Dataset::with_feature(FeatureSpec spec, std::span<const double> values) const {
    require(values.size() == n_rows_, "derived feature length must equal row count");
    auto specs = features_;
    specs.push_back(std::move(spec));
    std::vector<double> out;
    out.reserve(n_rows_ * (stride() + 1));
    for (std::size_t i = 0; i < n_rows_; ++i) {
        for (std::size_t j = 0; j < n_features(); ++j) {
            out.push_back(feature(i, j));
        }
        out.push_back(values[i]);
        out.push_back(target_value(i));
    }
    return Dataset(name_, std::move(specs), target_, std::move(out));
}

Dataset parse_dataset(const std::string& text, const Schema& schema, std::string name) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorKind::Schema, "dataset has no header row");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto header = split_cells(line);
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < header.size(); ++i) {
        position.emplace(std::string(header[i]), i);
    }

    std::vector<std::size_t> source;  // schema column -> file column
    std::vector<std::string> names;
    for (const auto& f : schema.features) {
        names.push_back(f.name);
    }
    names.push_back(schema.target.name);
    for (const auto& n : names) {
        auto it = position.find(n);
        if (it == position.end()) {
            fail(ErrorKind::Schema, "missing column '" + n + "'");
        }
        source.push_back(it->second);
    }

    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        ++row;
        const auto cells = split_cells(line);
        if (cells.size() != header.size()) {
            throw ParseError(row, "", "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                          " cells, header has " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < source.size(); ++c) {
            const auto cell = cells[source[c]];
            double v = 0.0;
            const auto* end = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(cell.data(), end, v);
            if (cell.empty() || ec != std::errc{} || ptr != end) {
                throw ParseError(row, names[c],
                                 "cannot parse '" + std::string(cell) + "' as a number at row " +
                                     std::to_string(row) + ", column '" + names[c] + "'");
            }
            if (!std::isfinite(v)) {
                fail(ErrorKind::Validation, "non-finite value at row " + std::to_string(row) + ", column '" +
                                                names[c] + "'");
            }
            values.push_back(v);
        }
    }
    return Dataset(std::move(name), schema.features, schema.target, std::move(values));
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open dataset file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dataset(buffer.str(), schema, path.stem().string());
}

} // namespace mlaudit
