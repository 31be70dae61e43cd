// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include <algorithm>
#include <fstream>

#include "mlaudit/abduction.hpp"
#include "mlaudit/cluster.hpp"
#include "mlaudit/design_opt.hpp"
#include "mlaudit/error.hpp"
#include "run_context.hpp"

namespace mlaudit::detail {

namespace {

json config_rows_json(const std::vector<ScreenResult>& rows, const std::vector<std::string>& features, Table& t) {
    json out = json::array();
    std::size_t rank = 1;
    for (const auto& r : rows) {
        json values = json::object();
        std::vector<std::string> cells{std::to_string(rank)};
        for (std::size_t j = 0; j < features.size(); ++j) {
            values[features[j]] = r.config.values[j];
            cells.push_back(format_number(r.config.values[j]));
        }
        cells.push_back(format_number(r.predicted_fr));
        cells.push_back(format_number(r.feasibility));
        t.row(std::move(cells));
        out.push_back({{"rank", rank},
                       {"source_index", r.source_index},
                       {"config", values},
                       {"predicted_fr", r.predicted_fr},
                       {"feasibility", r.feasibility}});
        ++rank;
    }
    return out;
}

Table topk_table(const std::vector<std::string>& features) {
    std::vector<std::string> header{"rank"};
    header.insert(header.end(), features.begin(), features.end());
    header.emplace_back("predicted_fr");
    header.emplace_back("feasibility");
    return Table(header);
}

ExplainConfig shap_config(const RunContext& ctx) {
    ExplainConfig cfg;
    cfg.n_coalitions = ctx.count("n_coalitions", cfg.n_coalitions);
    cfg.seed = ctx.seed_for("explain");
    return cfg;
}

std::vector<DesignConfig> configs_from_file(const RunContext& ctx, const GridConstraintSet& c) {
    std::ifstream in(ctx.resolve(ctx.str("configs")));
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("malformed configs file: ") + e.what());
    }
    const json* block = &j;
    if (j.contains("report")) {
        block = &j.at("report");
    }
    if (block->at("features").get<std::vector<std::string>>() != c.features()) {
        fail(ErrorKind::Schema, "configs file features do not match the constraint set");
    }
    std::vector<DesignConfig> out;
    for (const auto& row : block->at("configs")) {
        const auto values = row.get<std::vector<double>>();
        if (values.size() != c.rules.size()) {
            fail(ErrorKind::Schema, "config row has the wrong number of values");
        }
        std::vector<std::size_t> index;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const auto idx = c.rules[k].index_of(values[k]);
            if (!idx) {
                fail(ErrorKind::Validation, "config value " + format_number(values[k]) + " is not on the '" +
                                                c.rules[k].feature() + "' lattice");
            }
            index.push_back(*idx);
        }
        out.push_back(make_config(c, std::move(index)));
    }
    return out;
}

} // namespace

json screen_report(const TrainedModel& m, const GridConstraintSet& c, const std::vector<DesignConfig>& configs,
                   double target, std::size_t k, double fr_max, const ExplainConfig& cfg, Table& t,
                   std::string& status) {
    ScreenOptions opts;
    opts.fr_max = fr_max;
    const auto results = screen_configs(m, c, configs, target, opts);
    const TopKReport top = top_k_report(results, k, m, cfg);
    std::size_t meeting = 0;
    double sum = 0.0;
    for (const auto& r : results) {
        meeting += r.meets_target ? 1U : 0U;
        sum += r.predicted_fr;
    }
    bool all_valid = true;
    for (const auto& r : top.rows) {
        all_valid = all_valid && is_valid_config(c, r.config);
    }
    status = top.status;
    json j{{"target_fr", target},
           {"fr_max", fr_max},
           {"screened", results.size()},
           {"meeting_target", meeting},
           {"mean_predicted_fr", results.empty() ? 0.0 : sum / static_cast<double>(results.size())},
           {"status", top.status},
           {"all_on_lattice", all_valid},
           {"top", config_rows_json(top.rows, c.features(), t)}};
    j["best_attribution"] = top.best_attribution ? to_json(*top.best_attribution) : json(nullptr);
    return j;
}

void cmd_abduce(RunContext& ctx) {
    const TrainedModel m = load_model(ctx.resolve(ctx.str("model_file")));
    const GridConstraintSet c = load_constraints_param(ctx, "rc_fire");
    const double target = ctx.num("target_fr", 120.0);
    std::vector<DesignConfig> configs;
    if (ctx.has("configs")) {
        configs = configs_from_file(ctx, c);
    } else {
        configs = sample_configs(c, ctx.count("n", 100000), ctx.seed_for("abduction"));
    }
    Table t = topk_table(c.features());
    std::string status;
    ctx.report["abduction"] = screen_report(m, c, configs, target, ctx.count("k", 5), ctx.num("fr_max", kDefaultFrMax),
                                            shap_config(ctx), t, status);
    ctx.status = status;
    ctx.tables["topk"] = t.str();
}

namespace {

Dataset cluster_input(const RunContext& ctx, const Dataset& d) {
    if (!ctx.flag("include_target", false)) {
        return d;
    }
    const auto y = d.targets();
    FeatureSpec spec = d.target();
    spec.name = "target:" + spec.name;
    return d.with_feature(spec, y);
}

KSelection run_clustering(const RunContext& ctx, const Dataset& d) {
    const Matrix X = cluster_input(ctx, d).feature_matrix();
    const std::string kspec = ctx.str("k", "auto");
    KMeansOptions opts;
    opts.restarts = ctx.count("restarts", opts.restarts);
    const std::uint64_t seed = ctx.seed_for("cluster");
    if (kspec == "auto") {
        const std::size_t k_min = ctx.count("k_min", 2);
        const std::size_t k_max = std::min(ctx.count("k_max", 10), X.rows() > 0 ? X.rows() - 1 : 0);
        return select_k(X, k_min, k_max, seed, opts);
    }
    const std::size_t k = ctx.count("k", 2);
    KSelection s;
    s.k = k;
    s.best = kmeans(X, k, derive_seed(seed, k), opts);
    s.table.push_back({k, k >= 2 ? silhouette(X, s.best.labels) : 0.0, s.best.inertia});
    return s;
}

} // namespace

void cmd_cluster(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const KSelection sel = run_clustering(ctx, d);
    const ClusterCharacterization ch = characterize_clusters(d, sel.best);
    ctx.report["dataset"] = d.name();
    ctx.report["include_target"] = ctx.flag("include_target", false);
    ctx.report["selection"] = to_json(sel);
    ctx.report["clustering"] = {{"k", sel.best.k},
                                {"inertia", sel.best.inertia},
                                {"iterations", sel.best.iterations},
                                {"restart", sel.best.restart},
                                {"centroids_standardized", to_json(sel.best.centroids)},
                                {"centroids", to_json(sel.best.centroids_original)},
                                {"labels", sel.best.labels}};
    ctx.report["profiles"] = to_json(ch);
    Table diag({"k", "silhouette", "inertia"});
    for (const auto& r : sel.table) {
        diag.row({std::to_string(r.k), format_number(r.silhouette), format_number(r.inertia)});
    }
    ctx.tables["k_diagnostics"] = diag.str();
    std::vector<std::string> header{"cluster", "count", "target_mean"};
    const auto names = d.feature_names();
    header.insert(header.end(), names.begin(), names.end());
    Table prof(header);
    for (const auto& p : ch.profiles) {
        std::vector<std::string> cells{std::to_string(p.cluster), std::to_string(p.count), format_number(p.target_mean)};
        for (double v : p.means) {
            cells.push_back(format_number(v));
        }
        prof.row(std::move(cells));
    }
    ctx.tables["profiles"] = prof.str();
}

std::size_t best_cluster(const ClusterCharacterization& ch) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < ch.profiles.size(); ++c) {
        if (ch.profiles[c].count > 0 && ch.profiles[c].target_mean > ch.profiles[best].target_mean) {
            best = c;
        }
    }
    return best;
}

void cmd_hypothesize(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const GridConstraintSet c = load_constraints_param(ctx, d.name());
    const KSelection sel = run_clustering(ctx, d);
    const ClusterCharacterization ch = characterize_clusters(d, sel.best);
    std::size_t cluster = best_cluster(ch);
    if (ctx.has("cluster") && ctx.str("cluster") != "best") {
        cluster = ctx.count("cluster", 0);
        if (cluster >= ch.profiles.size() || ch.profiles[cluster].count == 0) {
            fail(ErrorKind::InvalidArgument, "cluster " + std::to_string(cluster) + " does not exist");
        }
    }
    const std::size_t n = ctx.count("n", 1000);
    const double scale = ctx.num("scale", 0.15);
    const auto configs = perturb_around_centroid(ch.profiles[cluster], c, n, scale, ctx.seed_for("hypothesize"));
    json rows = json::array();
    for (const auto& cfg : configs) {
        rows.push_back(cfg.values);
    }
    ctx.report["dataset"] = d.name();
    ctx.report["k"] = sel.k;
    ctx.report["cluster"] = cluster;
    ctx.report["profile"] = {{"count", ch.profiles[cluster].count},
                             {"means", ch.profiles[cluster].means},
                             {"target_mean", ch.profiles[cluster].target_mean}};
    ctx.report["scale"] = scale;
    ctx.report["features"] = c.features();
    ctx.report["configs"] = std::move(rows);
    std::vector<std::string> header = c.features();
    Table t(header);
    for (const auto& cfg : configs) {
        std::vector<std::string> cells;
        for (double v : cfg.values) {
            cells.push_back(format_number(v));
        }
        t.row(std::move(cells));
    }
    ctx.tables["configs"] = t.str();
}

json optimize_json(const OptimizeReport& rep, const SectionCatalog& catalog, Table* t) {
    json front = json::array();
    std::size_t top = 0;
    for (std::size_t i = 0; i < rep.front.size(); ++i) {
        const auto& r = rep.front[i];
        front.push_back(to_json(r));
        if (r.r > rep.front[top].r) {
            top = i;
        }
        if (t != nullptr) {
            t->row({format_number(r.design.fc), format_number(r.design.diameter), r.design.filling,
                    r.design.aggregate, r.design.steel_pct_class, r.design.cover_class, format_number(r.design.f_factor),
                    format_number(r.r), format_number(r.volume), r.catalog_feasible ? "true" : "false",
                    r.nearest_designation});
        }
    }
    json j{{"status", rep.status},
           {"evaluated", rep.evaluated},
           {"distinct", rep.distinct},
           {"feasible", rep.feasible},
           {"front", front}};
    if (!rep.front.empty()) {
        j["top_r_index"] = top;
        j["top_r"] = to_json(rep.front[top]);
        j["snap"] = to_json(snap_to_catalog(rep.front[top].design, catalog));
        std::size_t feasible_members = 0;
        for (const auto& r : rep.front) {
            feasible_members += r.catalog_feasible ? 1U : 0U;
        }
        j["catalog_feasible_members"] = feasible_members;
    }
    return j;
}

Table front_table() {
    return Table({"fc", "diameter", "filling", "aggregate", "steel_pct_class", "cover_class", "f", "r", "volume",
                  "catalog_feasible", "nearest_section"});
}

SectionCatalog catalog_param(const RunContext& ctx, const DesignSpace& space) {
    const std::string value = ctx.str("catalog", "catalog/chs_sections.csv");
    if (value == "exhaustive") {
        return exhaustive_catalog(space);
    }
    return load_section_catalog(ctx.resolve(value));
}

void cmd_optimize(RunContext& ctx) {
    const DesignSpace space = load_design_space(ctx.resolve(ctx.str("space", "design/cfst_space.json")));
    const SectionCatalog catalog = catalog_param(ctx, space);
    const OptimizeReport rep = optimize_design(space, catalog, ctx.num("r_limit", 120.0), ctx.count("budget", 100000),
                                               ctx.seed_for("optimize"));
    Table t = front_table();
    ctx.report["optimize"] = optimize_json(rep, catalog, &t);
    ctx.status = rep.status;
    ctx.tables["front"] = t.str();
}

} // namespace mlaudit::detail
