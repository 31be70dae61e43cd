// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include <algorithm>
#include <cmath>
#include <map>

#include "mlaudit/error.hpp"
#include "mlaudit/explain.hpp"
#include "mlaudit/expression.hpp"
#include "mlaudit/formulas.hpp"
#include "mlaudit/importance.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/symreg.hpp"
#include "mlaudit/validation.hpp"
#include "run_context.hpp"

namespace mlaudit::detail {

void cmd_health(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    ctx.report["dataset"] = d.name();
    ctx.report["health"] = to_json(health_check(d));
}

void cmd_assoc(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const AssociationReport a = association_matrices(d);
    ctx.report["dataset"] = d.name();
    ctx.report["association"] = to_json(a);
    const std::pair<const char*, const Matrix*> mats[] = {
        {"pearson", &a.pearson}, {"spearman", &a.spearman}, {"mutual_info", &a.mutual_info}};
    for (const auto& [name, m] : mats) {
        std::vector<std::string> header{"column"};
        header.insert(header.end(), a.columns.begin(), a.columns.end());
        Table t(header);
        for (std::size_t i = 0; i < m->rows(); ++i) {
            std::vector<std::string> cells{a.columns[i]};
            for (std::size_t j = 0; j < m->cols(); ++j) {
                cells.push_back(format_number((*m)(i, j)));
            }
            t.row(std::move(cells));
        }
        ctx.tables[name] = t.str();
    }
}

namespace {

json importance_json(const TrainedModel& m, const Dataset& eval_rows, std::uint64_t seed, std::size_t repeats) {
    json out = json::object();
    if (m.kind() == ModelKind::Tree || m.kind() == ModelKind::Forest) {
        out["gini"] = to_json(gini_importance(m));
    }
    if (eval_rows.n_rows() > 0) {
        const auto y = eval_rows.targets();
        out["permutation"] = to_json(permutation_importance(m, eval_rows.feature_matrix(), y, repeats, seed));
    }
    return out;
}

} // namespace

void cmd_train(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const ModelSpec spec = model_spec_from(ctx.params.value("model", json()), ctx.seed_for("surrogate"));
    const TrainedModel m = fit(spec, d);
    const auto y = d.targets();
    ctx.report["dataset"] = d.name();
    ctx.report["n_rows"] = d.n_rows();
    ctx.report["features"] = d.feature_names();
    ctx.report["spec"] = to_json(spec);
    ctx.report["train_metrics"] = to_json(evaluate_metrics(y, m.predict(d.feature_matrix())));
    if (m.kind() == ModelKind::Tree || m.kind() == ModelKind::Forest) {
        ctx.report["gini_importance"] = to_json(gini_importance(m));
    }
    if (const auto lc = m.linear_coefficients()) {
        ctx.report["coefficients"] = {{"coef", lc->coef}, {"intercept", lc->intercept}};
    }
    if (ctx.has("model_out")) {
        const std::string out = ctx.str("model_out");
        save_model(m, out);
        ctx.report["model_path"] = out;
    }
}

void cmd_eval(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const ModelSpec spec = model_spec_from(ctx.params.value("model", json()), ctx.seed_for("surrogate"));
    SplitRatios ratios;
    if (ctx.has("ratios")) {
        const auto r = ctx.params.at("ratios").get<std::vector<double>>();
        require(r.size() == 3, "ratios must hold three values");
        ratios = {r[0], r[1], r[2]};
    }
    const std::size_t k = ctx.count("k", 10);
    const CVReport cv = cross_validate(spec, d, k, ctx.seed_for("cv"), ratios);
    ctx.report["dataset"] = d.name();
    ctx.report["features"] = d.feature_names();
    ctx.report["spec"] = to_json(spec);
    ctx.report["cv"] = to_json(cv);
    if (ctx.flag("importance", true)) {
        std::vector<std::size_t> pool = cv.split.train;
        pool.insert(pool.end(), cv.split.validation.begin(), cv.split.validation.end());
        const TrainedModel m = fit(spec, d.subset(pool));
        ctx.report["importance"] = importance_json(m, d.subset(cv.split.test), ctx.seed_for("importance"),
                                                   ctx.count("repeats", 5));
    }
    Table t({"fold", "mae", "rmse", "r2", "n"});
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
        const auto& r = cv.folds[f];
        t.row({std::to_string(f), format_number(r.mae), format_number(r.rmse), format_number(r.r2), std::to_string(r.n)});
    }
    ctx.tables["folds"] = t.str();
}

namespace {

ExplainConfig explain_config(const RunContext& ctx) {
    ExplainConfig cfg;
    cfg.n_coalitions = ctx.count("n_coalitions", cfg.n_coalitions);
    cfg.lime_n_samples = ctx.count("lime_n_samples", cfg.lime_n_samples);
    cfg.lime_kernel_width = ctx.num("lime_kernel_width", cfg.lime_kernel_width);
    cfg.seed = ctx.seed_for("explain");
    return cfg;
}

TrainedModel model_param(const RunContext& ctx, const Dataset* train_on) {
    if (ctx.has("model_file")) {
        return load_model(ctx.resolve(ctx.str("model_file")));
    }
    if (train_on == nullptr) {
        fail(ErrorKind::InvalidArgument, "missing required parameter 'model_file'");
    }
    return fit(model_spec_from(ctx.params.value("model", json()), ctx.seed_for("surrogate")), *train_on);
}

void check_model_features(const TrainedModel& m, const Dataset& d) {
    if (m.feature_names() != d.feature_names()) {
        fail(ErrorKind::Schema, "model features do not match the dataset features");
    }
}

std::vector<double> row_values(const Dataset& d, std::size_t i) {
    std::vector<double> x(d.n_features());
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = d.feature(i, j);
    }
    return x;
}

} // namespace

void cmd_explain(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const TrainedModel m = model_param(ctx, &d);
    check_model_features(m, d);
    const ExplainConfig cfg = explain_config(ctx);
    const std::string method = ctx.str("method", "both");
    if (method != "shap" && method != "lime" && method != "both") {
        fail(ErrorKind::InvalidArgument, "method must be shap, lime or both");
    }
    const auto rows = parse_rows(ctx.params.value("row", json(0)), d.n_rows());
    const double eps = ctx.num("epsilon", kDefaultDisagreementEpsilon);
    json out = json::array();
    for (std::size_t r : rows) {
        const auto x = row_values(d, r);
        json entry{{"row", r}, {"x", x}, {"prediction", m.predict_row(x)}};
        std::optional<Attribution> shap;
        std::optional<Attribution> lime;
        if (method != "lime") {
            shap = kernel_shap(m, x, cfg);
            entry["shap"] = to_json(*shap);
        }
        if (method != "shap") {
            lime = lime_explain(m, x, cfg);
            entry["lime"] = to_json(*lime);
        }
        if (shap && lime) {
            try {
                entry["disagreement"] = to_json(rashomon_disagreement(normalize_attribution(*shap),
                                                                      normalize_attribution(*lime), eps));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Degenerate) {
                    throw;
                }
                entry["disagreement"] = nullptr;
            }
        }
        out.push_back(std::move(entry));
    }
    ctx.report["explanations"] = std::move(out);
}

void cmd_rashomon(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    const TrainedModel m = model_param(ctx, &d);
    check_model_features(m, d);
    const ExplainConfig cfg = explain_config(ctx);
    const double eps = ctx.num("epsilon", kDefaultDisagreementEpsilon);
    const auto rows = parse_rows(ctx.params.value("rows", json("all")), d.n_rows());
    std::optional<PhysicsExpectation> expect;
    if (ctx.has("expectations")) {
        expect = load_physics_expectation(ctx.resolve(ctx.str("expectations")));
    }

    json per_row = json::array();
    std::map<std::size_t, std::size_t> histogram;
    std::map<std::string, std::size_t> opposed_by_feature;
    std::map<std::string, std::size_t> shap_violations;
    std::map<std::string, std::size_t> lime_violations;
    std::size_t degenerate = 0;
    Table rows_table({"row", "prediction", "count", "shap_violations", "lime_violations"});
    for (std::size_t r : rows) {
        const auto x = row_values(d, r);
        const Attribution shap = kernel_shap(m, x, cfg);
        const Attribution lime = lime_explain(m, x, cfg);
        json entry{{"row", r}, {"prediction", m.predict_row(x)}};
        Attribution sn;
        Attribution ln;
        try {
            sn = normalize_attribution(shap);
            ln = normalize_attribution(lime);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Degenerate) {
                throw;
            }
            ++degenerate;
            entry["count"] = nullptr;
            entry["note"] = "all-zero attribution";
            per_row.push_back(std::move(entry));
            continue;
        }
        const DisagreementReport rep = rashomon_disagreement(sn, ln, eps);
        ++histogram[rep.count];
        for (const auto& f : rep.per_feature) {
            if (f.opposed) {
                ++opposed_by_feature[f.feature];
            }
        }
        entry["count"] = rep.count;
        entry["disagreement"] = to_json(rep);
        std::size_t sv = 0;
        std::size_t lv = 0;
        if (expect) {
            const auto vs = physics_consistency(sn, *expect, eps);
            const auto vl = physics_consistency(ln, *expect, eps);
            for (const auto& v : vs) {
                ++shap_violations[v.feature];
            }
            for (const auto& v : vl) {
                ++lime_violations[v.feature];
            }
            entry["shap_violations"] = to_json(vs);
            entry["lime_violations"] = to_json(vl);
            sv = vs.size();
            lv = vl.size();
        }
        rows_table.row({std::to_string(r), format_number(entry["prediction"].get<double>()), std::to_string(rep.count),
                        std::to_string(sv), std::to_string(lv)});
        per_row.push_back(std::move(entry));
    }
    Table hist({"disagreements", "rows"});
    for (const auto& [count, n] : histogram) {
        hist.row({std::to_string(count), std::to_string(n)});
    }
    std::size_t total = 0;
    std::size_t with = 0;
    for (const auto& [count, n] : histogram) {
        total += count * n;
        with += count > 0 ? n : 0;
    }
    ctx.report["epsilon"] = eps;
    ctx.report["model_kind"] = std::string(to_string(m.kind()));
    ctx.report["rows"] = std::move(per_row);
    ctx.report["summary"] = {{"rows_explained", rows.size() - degenerate},
                             {"rows_degenerate", degenerate},
                             {"rows_with_disagreement", with},
                             {"total_disagreements", total},
                             {"opposed_by_feature", opposed_by_feature}};
    if (expect) {
        ctx.report["physics"] = {{"shap_violations_by_feature", shap_violations},
                                 {"lime_violations_by_feature", lime_violations}};
    }
    ctx.tables["rashomon_rows"] = rows_table.str();
    ctx.tables["rashomon_histogram"] = hist.str();
}

// ---------------------------------------------------------------------------

GpConfig gp_config(const RunContext& ctx, std::uint64_t seed) {
    GpConfig cfg;
    cfg.population = ctx.count("population", cfg.population);
    cfg.generations = ctx.count("generations", cfg.generations);
    cfg.max_nodes = ctx.count("max_nodes", cfg.max_nodes);
    cfg.crossover_rate = ctx.num("crossover_rate", cfg.crossover_rate);
    cfg.mutation_rate = ctx.num("mutation_rate", cfg.mutation_rate);
    cfg.parsimony = ctx.num("parsimony", cfg.parsimony);
    cfg.seed = seed;
    if (ctx.has("operators")) {
        cfg.operators.clear();
        static const std::map<std::string, Op> names{{"+", Op::Add},      {"-", Op::Sub},     {"*", Op::Mul},
                                                     {"/", Op::Div},      {"^", Op::Pow},     {"sqrt", Op::Sqrt},
                                                     {"exp", Op::Exp},    {"log", Op::Log},   {"abs", Op::Abs}};
        for (const auto& s : ctx.params.at("operators").get<std::vector<std::string>>()) {
            const auto it = names.find(s);
            if (it == names.end()) {
                fail(ErrorKind::InvalidArgument, "unknown operator '" + s + "'");
            }
            cfg.operators.push_back(it->second);
        }
    }
    return cfg;
}

json archive_json(const ParetoArchive& a, const Dataset& d, Table* table) {
    const auto y = d.targets();
    const Matrix X = d.feature_matrix();
    const auto names = d.feature_names();
    json entries = json::array();
    for (const auto& e : a.entries()) {
        std::vector<double> pred(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) {
            pred[i] = eval_expression(e.tree, X.row(i));
        }
        double r2 = 0.0;
        bool defined = true;
        try {
            r2 = r_squared(y, pred);
        } catch (const Error&) {
            defined = false;
        }
        const std::string text = expression_to_string(e.tree, names);
        json je{{"complexity", e.complexity}, {"mse", e.mse}, {"expression", text}};
        je["r2"] = defined ? json(r2) : json(nullptr);
        entries.push_back(je);
        if (table != nullptr) {
            table->row({std::to_string(e.complexity), format_number(e.mse), defined ? format_number(r2) : "", text});
        }
    }
    return entries;
}

void cmd_symreg(RunContext& ctx) {
    const Dataset d = load_dataset_param(ctx);
    require(d.n_rows() > 0, "symreg needs a non-empty dataset");
    const GpConfig cfg = gp_config(ctx, ctx.seed_for("symreg"));
    const ParetoArchive archive = gp_search(d, cfg);
    Table t({"complexity", "mse", "r2", "expression"});
    ctx.report["dataset"] = d.name();
    ctx.report["n_rows"] = d.n_rows();
    ctx.report["features"] = d.feature_names();
    ctx.report["target"] = d.target().name;
    ctx.report["config"] = {{"population", cfg.population},
                            {"generations", cfg.generations},
                            {"max_nodes", cfg.max_nodes},
                            {"parsimony", cfg.parsimony},
                            {"seed", cfg.seed}};
    ctx.report["archive"] = archive_json(archive, d, &t);
    ctx.tables["archive"] = t.str();
}

void cmd_formula(RunContext& ctx) {
    if (!ctx.has("name")) {
        json list = json::array();
        Table t({"id", "expression", "unit"});
        for (const auto& f : formulas::formula_registry()) {
            list.push_back({{"id", f.id}, {"expression", f.expression}, {"unit", f.output_unit}});
            t.row({f.id, f.expression, f.output_unit});
        }
        ctx.report["formulas"] = list;
        ctx.tables["formulas"] = t.str();
        return;
    }
    const auto& info = formulas::find_formula(ctx.str("name"));
    std::map<std::string, double> values;
    if (ctx.has("values")) {
        for (const auto& [k, v] : ctx.params.at("values").items()) {
            if (v.is_number()) {
                values[k] = v.get<double>();
            } else {
                try {
                    std::size_t used = 0;
                    const auto s = v.get<std::string>();
                    values[k] = std::stod(s, &used);
                    if (used != s.size()) {
                        throw std::invalid_argument(s);
                    }
                } catch (const std::exception&) {
                    fail(ErrorKind::InvalidArgument, "formula parameter '" + k + "' is not a number");
                }
            }
        }
    }
    const double value = info.evaluate(values);
    json symbols = json::array();
    Table t({"symbol", "unit", "meaning"});
    for (const auto& s : info.parameters) {
        symbols.push_back({{"name", s.name}, {"unit", s.unit}, {"meaning", s.meaning}});
        t.row({s.name, s.unit, s.meaning});
    }
    ctx.report["formula"] = info.id;
    ctx.report["expression"] = info.expression;
    ctx.report["value"] = value;
    ctx.report["unit"] = info.output_unit;
    ctx.report["inputs"] = values;
    ctx.report["symbols"] = symbols;
    ctx.report["notes"] = info.notes;
    ctx.tables["symbols"] = t.str();
}

} // namespace mlaudit::detail
