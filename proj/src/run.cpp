// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/run.hpp"

#include <cstdlib>
#include <functional>

#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"
#include "run_context.hpp"

#ifndef MLAUDIT_SOURCE_DATA_DIR
#define MLAUDIT_SOURCE_DATA_DIR "data"
#endif

namespace mlaudit {

namespace detail {

std::uint64_t RunContext::seed_for(std::string_view module) const { return derive_seed(seed, module); }

bool RunContext::has(const std::string& key) const { return params.contains(key) && !params.at(key).is_null(); }

namespace {

[[noreturn]] void bad_param(const std::string& key, const char* want) {
    fail(ErrorKind::InvalidArgument, "parameter '" + key + "' must be " + want);
}

} // namespace

std::string RunContext::str(const std::string& key, const std::string& fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const auto& v = params.at(key);
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number()) {
        return v.dump();
    }
    bad_param(key, "a string");
}

std::string RunContext::str(const std::string& key) const {
    if (!has(key)) {
        fail(ErrorKind::InvalidArgument, "missing required parameter '" + key + "'");
    }
    return str(key, "");
}

double RunContext::num(const std::string& key, double fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const auto& v = params.at(key);
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string()) {
        try {
            std::size_t used = 0;
            const std::string s = v.get<std::string>();
            const double d = std::stod(s, &used);
            if (used == s.size()) {
                return d;
            }
        } catch (const std::exception&) {
        }
    }
    bad_param(key, "a number");
}

std::size_t RunContext::count(const std::string& key, std::size_t fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    if (v < 0.0 || v != std::floor(v) || v > 1e15) {
        bad_param(key, "a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

bool RunContext::flag(const std::string& key, bool fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const auto& v = params.at(key);
    if (v.is_boolean()) {
        return v.get<bool>();
    }
    if (v.is_number()) {
        return v.get<double>() != 0.0;
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "true" || s == "1" || s == "yes" || s == "on") {
            return true;
        }
        if (s == "false" || s == "0" || s == "no" || s == "off") {
            return false;
        }
    }
    bad_param(key, "a boolean");
}

std::filesystem::path RunContext::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_absolute() || std::filesystem::exists(p)) {
        return p;
    }
    const auto alt = data_dir / p;
    if (std::filesystem::exists(alt)) {
        return alt;
    }
    fail(ErrorKind::Io, "file not found: " + path + " (also looked in " + data_dir.string() + ")");
}

Schema RunContext::schema(const std::string& name_or_path) const {
    std::filesystem::path p(name_or_path);
    if (p.extension() == ".json") {
        return load_schema(resolve(name_or_path));
    }
    const auto named = data_dir / "schemas" / (name_or_path + ".json");
    if (!std::filesystem::exists(named)) {
        fail(ErrorKind::Schema, "unknown schema '" + name_or_path + "' (no " + named.string() + ")");
    }
    return load_schema(named);
}

namespace {

bool compare(double a, const std::string& op, double b) {
    if (op == "==") {
        return a == b;
    }
    if (op == "!=") {
        return a != b;
    }
    if (op == "<") {
        return a < b;
    }
    if (op == "<=") {
        return a <= b;
    }
    if (op == ">") {
        return a > b;
    }
    if (op == ">=") {
        return a >= b;
    }
    fail(ErrorKind::InvalidArgument, "unknown filter operator '" + op + "'");
}

} // namespace

Dataset load_dataset_param(const RunContext& ctx, const json& params) {
    if (!params.contains("dataset")) {
        fail(ErrorKind::InvalidArgument, "missing required parameter 'dataset'");
    }
    const auto path_text = params.at("dataset").get<std::string>();
    const auto path = ctx.resolve(path_text);
    const std::string schema_name = params.value("schema", path.stem().string());
    Dataset d = load_dataset(path, ctx.schema(schema_name));
    if (params.contains("target") && params.at("target").is_string() &&
        params.at("target").get<std::string>() != d.target().name) {
        fail(ErrorKind::Schema, "schema '" + schema_name + "' declares target '" + d.target().name + "', not '" +
                                    params.at("target").get<std::string>() + "'");
    }

    try {
        for (const auto& dv : params.value("derive", json::array())) {
            const auto name = dv.at("name").get<std::string>();
            const std::size_t num = d.require_feature(dv.at("numerator").get<std::string>());
            const std::size_t den = d.require_feature(dv.at("denominator").get<std::string>());
            std::vector<double> values(d.n_rows());
            for (std::size_t i = 0; i < d.n_rows(); ++i) {
                const double b = d.feature(i, den);
                if (b == 0.0) {
                    fail(ErrorKind::Domain, "derived feature '" + name + "': zero denominator in row " +
                                                std::to_string(i + 1));
                }
                values[i] = d.feature(i, num) / b;
            }
            d = d.with_feature(FeatureSpec{name, dv.value("unit", std::string{}), FeatureKind::Continuous, {}}, values);
        }
        for (const auto& f : params.value("filter", json::array())) {
            const auto column = f.at("column").get<std::string>();
            const auto op = f.at("op").get<std::string>();
            const double value = f.at("value").get<double>();
            const bool is_target = column == d.target().name;
            const std::size_t col = is_target ? 0 : d.require_feature(column);
            d = d.filter([&](const Dataset& ds, std::size_t i) {
                return compare(is_target ? ds.target_value(i) : ds.feature(i, col), op, value);
            });
        }
        if (params.contains("features") && !params.at("features").is_null()) {
            d = d.select_features(params.at("features").get<std::vector<std::string>>());
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("malformed dataset options: ") + e.what());
    }
    return d;
}

Dataset load_dataset_param(const RunContext& ctx) { return load_dataset_param(ctx, ctx.params); }

GridConstraintSet load_constraints_param(const RunContext& ctx, const std::string& fallback_name) {
    const std::string value = ctx.str("constraints", "constraints/" + fallback_name + ".json");
    return load_grid_constraints(ctx.resolve(value));
}

std::vector<std::size_t> parse_rows(const json& spec, std::size_t n) {
    std::vector<std::size_t> rows;
    auto check = [&](long long i) {
        if (i < 0 || static_cast<std::size_t>(i) >= n) {
            fail(ErrorKind::InvalidArgument, "row " + std::to_string(i) + " outside 0.." + std::to_string(n) + ")");
        }
        return static_cast<std::size_t>(i);
    };
    if (spec.is_null() || (spec.is_string() && spec.get<std::string>() == "all")) {
        for (std::size_t i = 0; i < n; ++i) {
            rows.push_back(i);
        }
        return rows;
    }
    if (spec.is_number_integer()) {
        rows.push_back(check(spec.get<long long>()));
        return rows;
    }
    if (spec.is_array()) {
        for (const auto& v : spec) {
            rows.push_back(check(v.get<long long>()));
        }
        return rows;
    }
    if (spec.is_string()) {
        const auto s = spec.get<std::string>();
        const auto dash = s.find('-');
        try {
            if (dash == std::string::npos) {
                rows.push_back(check(std::stoll(s)));
                return rows;
            }
            const long long a = std::stoll(s.substr(0, dash));
            const long long b = std::stoll(s.substr(dash + 1));
            for (long long i = a; i <= b; ++i) {
                rows.push_back(check(i));
            }
            return rows;
        } catch (const std::logic_error&) {
        }
    }
    fail(ErrorKind::InvalidArgument, "rows must be 'all', 'a-b', an index or an index list");
}

} // namespace detail

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("MLAUDIT_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return MLAUDIT_SOURCE_DATA_DIR;
}

std::string run_json(const std::string& request_json) {
    using detail::json;
    json request;
    try {
        request = json::parse(request_json);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("request is not valid JSON: ") + e.what());
    }
    if (!request.is_object()) {
        fail(ErrorKind::InvalidArgument, "request must be a JSON object");
    }

    detail::RunContext ctx;
    try {
        ctx.command = request.at("command").get<std::string>();
        ctx.seed = request.value("seed", std::uint64_t{42});
        ctx.params = request.value("params", json::object());
        ctx.data_dir = request.contains("data_dir") ? std::filesystem::path(request.at("data_dir").get<std::string>())
                                                   : default_data_dir();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("malformed request: ") + e.what());
    }
    if (!ctx.params.is_object()) {
        fail(ErrorKind::InvalidArgument, "request params must be an object");
    }

    static const std::map<std::string, std::function<void(detail::RunContext&)>> handlers{
        {"health", detail::cmd_health},       {"assoc", detail::cmd_assoc},
        {"train", detail::cmd_train},         {"eval", detail::cmd_eval},
        {"explain", detail::cmd_explain},     {"rashomon", detail::cmd_rashomon},
        {"abduce", detail::cmd_abduce},       {"cluster", detail::cmd_cluster},
        {"hypothesize", detail::cmd_hypothesize}, {"optimize", detail::cmd_optimize},
        {"symreg", detail::cmd_symreg},       {"formula", detail::cmd_formula},
        {"pipeline", detail::cmd_pipeline},
    };
    const auto it = handlers.find(ctx.command);
    if (it == handlers.end()) {
        fail(ErrorKind::InvalidArgument, "unknown command '" + ctx.command + "'");
    }
    try {
        it->second(ctx);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("malformed parameters: ") + e.what());
    }

    json manifest{{"artifact", "mlaudit"},
                  {"version", kVersion},
                  {"schema_version", kReportSchemaVersion},
                  {"command", ctx.command},
                  {"seed", ctx.seed},
                  {"params", ctx.params}};
    if (request.contains("data_dir")) {
        manifest["data_dir"] = request.at("data_dir");
    }
    json response{{"schema_version", kReportSchemaVersion},
                  {"status", ctx.status},
                  {"manifest", manifest},
                  {"report", ctx.report},
                  {"tables", ctx.tables}};
    return response.dump(2);
}

} // namespace mlaudit
