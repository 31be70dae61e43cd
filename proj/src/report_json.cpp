// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "report_json.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "mlaudit/error.hpp"

namespace mlaudit::detail {

std::string format_number(double v) {
    if (!std::isfinite(v)) {
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    }
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

json to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

json to_json(const HealthReport& h) {
    return json{{"n_rows", h.n_rows},
                {"n_features", h.n_features},
                {"obs_per_feature", h.obs_per_feature},
                {"pass_vansmeden_10", h.pass_vansmeden_10},
                {"pass_riley_23", h.pass_riley_23},
                {"pass_ratio_3", h.pass_ratio_3},
                {"pass_ratio_5", h.pass_ratio_5},
                {"all_pass", h.all_pass()}};
}

json to_json(const AssociationReport& a) {
    return json{{"columns", a.columns},
                {"pearson", to_json(a.pearson)},
                {"spearman", to_json(a.spearman)},
                {"mutual_info", to_json(a.mutual_info)},
                {"degenerate", a.degenerate}};
}

json to_json(const MetricReport& m) {
    return json{{"mae", m.mae}, {"rmse", m.rmse}, {"r2", m.r2}, {"n", m.n}};
}

json to_json(const MetricSummary& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

json to_json(const CVReport& r) {
    json folds = json::array();
    for (const auto& f : r.folds) {
        folds.push_back(to_json(f));
    }
    return json{{"k", r.k},
                {"seed", r.seed},
                {"folds", folds},
                {"mae", to_json(r.mae)},
                {"rmse", to_json(r.rmse)},
                {"r2", to_json(r.r2)},
                {"train", to_json(r.train)},
                {"test", to_json(r.test)},
                {"split_sizes",
                 {{"train", r.split.train.size()}, {"validation", r.split.validation.size()}, {"test", r.split.test.size()}}}};
}

json to_json(const Attribution& a) {
    json j{{"method", to_string(a.method)},
           {"features", a.features},
           {"values", a.values},
           {"normalized", a.normalized},
           {"flagged", a.flagged}};
    j["base_value"] = a.base_value ? json(*a.base_value) : json(nullptr);
    if (!a.coefficients.empty()) {
        j["coefficients"] = a.coefficients;
    }
    if (!a.note.empty()) {
        j["note"] = a.note;
    }
    return j;
}

json to_json(const DisagreementReport& r) {
    json per = json::array();
    for (const auto& f : r.per_feature) {
        per.push_back({{"feature", f.feature}, {"shap_norm", f.shap}, {"lime_norm", f.lime}, {"opposed", f.opposed}});
    }
    return json{{"count", r.count}, {"epsilon", r.epsilon}, {"per_feature", per}};
}

json to_json(const std::vector<PhysicsViolation>& v) {
    json out = json::array();
    for (const auto& x : v) {
        out.push_back({{"feature", x.feature}, {"expected_sign", x.expected_sign}, {"value", x.value}});
    }
    return out;
}

json to_json(const ModelSpec& s) {
    return json{{"kind", std::string(to_string(s.kind))}, {"hyperparams", s.hyperparams}, {"seed", s.seed}};
}

ModelSpec model_spec_from(const json& j, std::uint64_t default_seed) {
    ModelSpec s;
    s.seed = default_seed;
    if (j.is_string()) {
        s.kind = parse_model_kind(j.get<std::string>());
        return s;
    }
    if (j.is_null()) {
        return s;
    }
    try {
        s.kind = parse_model_kind(j.value("kind", std::string("forest")));
        if (j.contains("hyperparams")) {
            s.hyperparams = j.at("hyperparams").get<std::map<std::string, double>>();
        }
        if (j.contains("seed")) {
            s.seed = j.at("seed").get<std::uint64_t>();
        }
        // Hyperparameters may also sit next to "kind".
        for (const auto& [key, value] : j.items()) {
            if (key == "kind" || key == "seed" || key == "hyperparams") {
                continue;
            }
            if (value.is_boolean()) {
                s.hyperparams[key] = value.get<bool>() ? 1.0 : 0.0;
            } else if (value.is_number()) {
                s.hyperparams[key] = value.get<double>();
            } else {
                fail(ErrorKind::InvalidArgument, "model spec field '" + key + "' must be a number");
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("malformed model spec: ") + e.what());
    }
    s.validate();
    return s;
}

json to_json(const CfstDesign& d) {
    return json{{"fc", d.fc},
                {"diameter", d.diameter},
                {"length", d.length},
                {"kl", d.kl},
                {"shape", d.shape},
                {"filling", d.filling},
                {"aggregate", d.aggregate},
                {"steel_pct_class", d.steel_pct_class},
                {"cover_class", d.cover_class},
                {"f_factor", d.f_factor},
                {"c_load", d.c_load}};
}

json to_json(const OptResult& r) {
    return json{{"design", to_json(r.design)},
                {"r", r.r},
                {"volume", r.volume},
                {"constraints_passed", r.constraints_passed},
                {"catalog_feasible", r.catalog_feasible},
                {"nearest_section", {{"designation", r.nearest_designation}, {"diameter", r.nearest_diameter}}}};
}

json to_json(const SnapReport& r) {
    return json{{"design", to_json(r.design)},
                {"designation", r.designation},
                {"before", {{"r", r.before.r}, {"volume", r.before.volume}}},
                {"after", {{"r", r.after.r}, {"volume", r.after.volume}}},
                {"delta_diameter", r.delta_diameter}};
}

json to_json(const KSelection& s) {
    json table = json::array();
    for (const auto& d : s.table) {
        table.push_back({{"k", d.k}, {"silhouette", d.silhouette}, {"inertia", d.inertia}});
    }
    return json{{"k", s.k}, {"table", table}};
}

json to_json(const ClusterCharacterization& c) {
    json profiles = json::array();
    for (const auto& p : c.profiles) {
        profiles.push_back({{"cluster", p.cluster},
                            {"count", p.count},
                            {"features", p.features},
                            {"means", p.means},
                            {"target_mean", p.target_mean}});
    }
    return json{{"profiles", profiles},
                {"global_means", c.global_means},
                {"global_target_mean", c.global_target_mean},
                {"dominant_cluster", c.dominant_cluster}};
}

// ---------------------------------------------------------------------------

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

Table& Table::row(std::vector<std::string> cells) {
    require(cells.size() == header_.size(), "table row width differs from header");
    rows_.push_back(std::move(cells));
    return *this;
}

namespace {

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        return cell;
    }
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += quote(cells[i]);
    }
    out += '\n';
}

} // namespace

std::string Table::str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& r : rows_) {
        append_line(out, r);
    }
    return out;
}

} // namespace mlaudit::detail
