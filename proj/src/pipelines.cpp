// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include <algorithm>
#include <filesystem>

#include "mlaudit/error.hpp"
#include "mlaudit/formulas.hpp"
#include "mlaudit/importance.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/symreg.hpp"
#include "mlaudit/validation.hpp"
#include "run_context.hpp"

namespace mlaudit::detail {

GpConfig gp_config(const RunContext& ctx, std::uint64_t seed);
json archive_json(const ParetoArchive& a, const Dataset& d, Table* table);

namespace {

json metric_block(std::span<const double> y, std::span<const double> pred) {
    json j = to_json(MetricReport{mae(y, pred), rmse(y, pred), r_squared(y, pred), y.size()});
    return j;
}

ModelSpec forest_spec(const RunContext& ctx) {
    return model_spec_from(ctx.params.value("model", json("forest")), ctx.seed_for("surrogate"));
}

void induction(RunContext& ctx) {
    json base = ctx.params;
    if (!base.contains("dataset")) {
        base["dataset"] = "concrete.csv";
    }
    const double age = ctx.num("age", 28.0);
    const double cutoff = ctx.num("nsc_max_strength", 50.0);
    const json wc = json::array({{{"name", "wc"}, {"numerator", "water"}, {"denominator", "cement"}}});

    // Normal-strength subset at the reference age, water/cement ratio only.
    json nsc_params = base;
    nsc_params["derive"] = wc;
    nsc_params["filter"] = json::array({{{"column", "age"}, {"op", "=="}, {"value", age}},
                                        {{"column", "strength"}, {"op", "<="}, {"value", cutoff}}});
    nsc_params["features"] = json::array({"wc"});
    const Dataset nsc = load_dataset_param(ctx, nsc_params);
    require(nsc.n_rows() >= 3, "normal-strength subset has fewer than 3 rows");
    const auto y = nsc.targets();
    const auto wcs = nsc.column(0);

    const auto constants = formulas::AbramConstants::for_age(age == 7.0 ? formulas::AbramAge::Day7
                                                                        : formulas::AbramAge::Day28);
    std::vector<double> abram(y.size());
    std::vector<double> sr_wc(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        abram[i] = formulas::abrams_strength(wcs[i], constants);
        sr_wc[i] = formulas::sr_wc_strength(wcs[i]);
    }
    const double abram_r2 = r_squared(y, abram);

    const GpConfig gp = gp_config(ctx, ctx.seed_for("symreg"));
    const ParetoArchive archive = gp_search(nsc, gp);
    Table archive_table({"complexity", "mse", "r2", "expression"});
    const json entries = archive_json(archive, nsc, &archive_table);
    double best_r2 = -std::numeric_limits<double>::infinity();
    json best = nullptr;
    for (const auto& e : entries) {
        if (!e["r2"].is_null() && e["r2"].get<double>() > best_r2) {
            best_r2 = e["r2"].get<double>();
            best = e;
        }
    }

    // Forest baselines: w/c only at the reference age, then every feature and age.
    const ModelSpec spec = forest_spec(ctx);
    const std::size_t k = ctx.count("k", 10);
    json wc_params = base;
    wc_params["derive"] = wc;
    wc_params["filter"] = json::array({{{"column", "age"}, {"op", "=="}, {"value", age}}});
    wc_params["features"] = json::array({"wc"});
    const Dataset wc_only = load_dataset_param(ctx, wc_params);
    const CVReport cv_wc = cross_validate(spec, wc_only, k, ctx.seed_for("cv"));

    json all_params = base;
    all_params.erase("features");
    const Dataset full = load_dataset_param(ctx, all_params);
    const CVReport cv_all = cross_validate(spec, full, k, ctx.seed_for("cv"));
    std::vector<std::size_t> pool = cv_all.split.train;
    pool.insert(pool.end(), cv_all.split.validation.begin(), cv_all.split.validation.end());
    const TrainedModel full_model = fit(spec, full.subset(pool));
    const Dataset test = full.subset(cv_all.split.test);
    const auto yt = test.targets();

    ctx.report["nsc"] = {{"age", age}, {"max_strength", cutoff}, {"rows", nsc.n_rows()}};
    ctx.report["abram"] = {{"a", constants.a}, {"b", constants.b}, {"metrics", metric_block(y, abram)}};
    ctx.report["sr_wc_as_printed"] = {{"metrics", metric_block(y, sr_wc)}};
    ctx.report["symreg"] = {{"archive", entries}, {"best", best}};
    ctx.report["symreg_beats_abram"] = best_r2 > abram_r2;
    ctx.report["forest_wc_only"] = {{"rows", wc_only.n_rows()}, {"cv", to_json(cv_wc)}};
    ctx.report["forest_all_features"] = {{"rows", full.n_rows()}, {"cv", to_json(cv_all)}};
    ctx.report["importance"] = {
        {"gini", full_model.kind() == ModelKind::Tree || full_model.kind() == ModelKind::Forest
                     ? to_json(gini_importance(full_model))
                     : json(nullptr)},
        {"permutation", to_json(permutation_importance(full_model, test.feature_matrix(), yt,
                                                       ctx.count("repeats", 5), ctx.seed_for("importance")))}};

    Table cmp({"model", "subset", "r2"});
    cmp.row({"abram", "nsc", format_number(abram_r2)});
    cmp.row({"sr_wc_as_printed", "nsc", format_number(r_squared(y, sr_wc))});
    cmp.row({"symreg_best", "nsc", format_number(best_r2)});
    cmp.row({"forest_wc_only", "age " + format_number(age) + " test", format_number(cv_wc.test.r2)});
    cmp.row({"forest_all_features", "all test", format_number(cv_all.test.r2)});
    ctx.tables["comparison"] = cmp.str();
    ctx.tables["archive"] = archive_table.str();
}

void abduction(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const GridConstraintSet c = load_constraints_param(ctx, d.name());
    const ModelSpec spec = forest_spec(ctx);
    const CVReport cv = cross_validate(spec, d, ctx.count("k", 10), ctx.seed_for("cv"));
    const TrainedModel m = fit(spec, d);

    ExplainConfig ecfg;
    ecfg.seed = ctx.seed_for("explain");
    const double fr_max = ctx.num("fr_max", kDefaultFrMax);
    const double target = ctx.num("target_fr", 120.0);
    const auto configs = sample_configs(c, ctx.count("n", 100000), ctx.seed_for("abduction"));
    Table top = Table({"placeholder"});
    {
        std::vector<std::string> header{"rank"};
        for (const auto& f : c.features()) {
            header.push_back(f);
        }
        header.emplace_back("predicted_fr");
        header.emplace_back("feasibility");
        top = Table(header);
    }
    Table top_high = top;
    std::string status;
    ctx.report["surrogate"] = {{"spec", to_json(spec)}, {"cv", to_json(cv)}};
    ctx.report["supervised"] = screen_report(m, c, configs, target, ctx.count("top_k", 5), fr_max, ecfg, top, status);
    ctx.status = status;

    // Unsupervised recipe: perturb around the best cluster and screen at a higher target.
    const double high = ctx.num("high_target_fr", 240.0);
    const Matrix X = d.feature_matrix();
    const std::size_t k_max = std::min<std::size_t>(ctx.count("k_max", 10), d.n_rows() - 1);
    const KSelection sel = select_k(X, ctx.count("k_min", 2), k_max, ctx.seed_for("cluster"));
    const ClusterCharacterization ch = characterize_clusters(d, sel.best);
    const std::size_t best = best_cluster(ch);
    const std::size_t n_hyp = ctx.count("n_hypotheses", 1000);
    const auto perturbed = perturb_around_centroid(ch.profiles[best], c, n_hyp, ctx.num("scale", 0.15),
                                                   ctx.seed_for("hypothesize"));
    const auto random = sample_configs(c, n_hyp, ctx.seed_for("baseline"));
    auto mean_pred = [&](const std::vector<DesignConfig>& cs) {
        Matrix M(cs.size(), c.rules.size());
        for (std::size_t i = 0; i < cs.size(); ++i) {
            std::copy(cs[i].values.begin(), cs[i].values.end(), M.row(i).begin());
        }
        const auto p = m.predict(M);
        double s = 0.0;
        for (double v : p) {
            s += v;
        }
        return p.empty() ? 0.0 : s / static_cast<double>(p.size());
    };
    std::string high_status;
    ctx.report["clusters"] = {{"selection", to_json(sel)}, {"profiles", to_json(ch)}, {"chosen_cluster", best}};
    ctx.report["hypotheses"] = {
        {"n", n_hyp},
        {"mean_predicted_fr_perturbed", mean_pred(perturbed)},
        {"mean_predicted_fr_random", mean_pred(random)},
        {"screen", screen_report(m, c, perturbed, high, ctx.count("top_k", 5), std::max(fr_max, high + 60.0), ecfg,
                                 top_high, high_status)}};
    ctx.tables["topk"] = top.str();
    ctx.tables["topk_high_target"] = top_high.str();
}

void rashomon(RunContext& ctx) {
    if (!ctx.has("expectations")) {
        const Dataset d = load_dataset_param(ctx);
        const auto candidate = ctx.data_dir / "physics" / (d.name() + "_expectations.json");
        if (std::filesystem::exists(candidate)) {
            RunContext sub = ctx;
            sub.params["expectations"] = candidate.string();
            cmd_rashomon(sub);
            ctx.report = sub.report;
            ctx.tables = sub.tables;
            ctx.report["expectations"] = candidate.filename().string();
            return;
        }
    }
    cmd_rashomon(ctx);
}

void optimize(RunContext& ctx) {
    cmd_optimize(ctx);
    const DesignSpace space = load_design_space(ctx.resolve(ctx.str("space", "design/cfst_space.json")));
    const SectionCatalog all = exhaustive_catalog(space);
    const OptimizeReport ablation = optimize_design(space, all, ctx.num("r_limit", 120.0), ctx.count("budget", 100000),
                                                    ctx.seed_for("optimize"));
    ctx.report["exhaustive_catalog"] = {{"status", ablation.status}, {"front_size", ablation.front.size()}};
}

} // namespace

void cmd_pipeline(RunContext& ctx) {
    const std::string name = ctx.str("name");
    ctx.report["pipeline"] = name;
    if (name == "induction") {
        induction(ctx);
    } else if (name == "abduction") {
        abduction(ctx);
    } else if (name == "rashomon") {
        rashomon(ctx);
    } else if (name == "optimize") {
        optimize(ctx);
    } else {
        fail(ErrorKind::InvalidArgument, "unknown pipeline '" + name + "' (induction, abduction, rashomon, optimize)");
    }
    ctx.report["pipeline"] = name;
}

} // namespace mlaudit::detail
