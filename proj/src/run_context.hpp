// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "mlaudit/abduction.hpp"
#include "mlaudit/cluster.hpp"
#include "mlaudit/dataset.hpp"
#include "mlaudit/design_opt.hpp"
#include "mlaudit/grid.hpp"
#include "mlaudit/model.hpp"
#include "mlaudit/rng.hpp"
#include "report_json.hpp"

namespace mlaudit::detail {

struct RunContext {
    std::string command;
    json params = json::object();
    std::uint64_t seed = 42;
    std::filesystem::path data_dir;

    std::string status = "ok";
    json report = json::object();
    std::map<std::string, std::string> tables;

    [[nodiscard]] std::uint64_t seed_for(std::string_view module) const;

    // Typed parameter access with defaults; wrong types raise usage errors.
    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] std::string str(const std::string& key) const;  // required
    [[nodiscard]] double num(const std::string& key, double fallback) const;
    [[nodiscard]] std::size_t count(const std::string& key, std::size_t fallback) const;
    [[nodiscard]] bool flag(const std::string& key, bool fallback) const;

    /// Existing path as given, else relative to the data directory.
    [[nodiscard]] std::filesystem::path resolve(const std::string& path) const;
    /// Schema by name (data/schemas/<name>.json) or by path.
    [[nodiscard]] Schema schema(const std::string& name_or_path) const;
};

/// Loads params "dataset" (+ optional "schema", "derive", "filter",
/// "features") from the given parameter object.
Dataset load_dataset_param(const RunContext& ctx, const json& params);
Dataset load_dataset_param(const RunContext& ctx);

GridConstraintSet load_constraints_param(const RunContext& ctx, const std::string& fallback_name);

/// Rows addressed by "all", "a-b" (inclusive), "i" or an index array.
std::vector<std::size_t> parse_rows(const json& spec, std::size_t n);

// Shared pieces of the command handlers
json screen_report(const TrainedModel& m, const GridConstraintSet& c, const std::vector<DesignConfig>& configs,
                   double target, std::size_t k, double fr_max, const ExplainConfig& cfg, Table& t,
                   std::string& status);
std::size_t best_cluster(const ClusterCharacterization& ch);
json optimize_json(const OptimizeReport& rep, const SectionCatalog& catalog, Table* t);
Table front_table();
SectionCatalog catalog_param(const RunContext& ctx, const DesignSpace& space);

// Command handlers
void cmd_health(RunContext& ctx);
void cmd_assoc(RunContext& ctx);
void cmd_train(RunContext& ctx);
void cmd_eval(RunContext& ctx);
void cmd_explain(RunContext& ctx);
void cmd_rashomon(RunContext& ctx);
void cmd_abduce(RunContext& ctx);
void cmd_cluster(RunContext& ctx);
void cmd_hypothesize(RunContext& ctx);
void cmd_optimize(RunContext& ctx);
void cmd_symreg(RunContext& ctx);
void cmd_formula(RunContext& ctx);
void cmd_pipeline(RunContext& ctx);

} // namespace mlaudit::detail
