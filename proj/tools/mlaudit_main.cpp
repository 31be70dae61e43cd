// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors
//
// Command-line front end. Every subcommand is translated into one JSON
// request and executed through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlaudit/mlaudit.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kParadox = 4 };

int exit_code_for(mla_status s) {
    switch (s) {
    case MLA_OK: return kOk;
    case MLA_INVALID_ARGUMENT:
    case MLA_DOMAIN:
    case MLA_UNSUPPORTED: return kUsage;
    case MLA_SCHEMA:
    case MLA_PARSE:
    case MLA_VALIDATION:
    case MLA_DEGENERATE:
    case MLA_IO: return kData;
    case MLA_INTERNAL: return kInternal;
    }
    return kInternal;
}

struct Common {
    std::uint64_t seed = 42;
    std::string output;
    std::string data_dir;
    std::string format = "json";
    std::vector<std::string> params;
};

struct DatasetOpts {
    std::string dataset;
    std::string schema;
    std::string features;
};

struct ModelOpts {
    std::string model;
    std::vector<std::string> hyper;
};

// "3" -> 3, "true" -> true, "[1,2]" -> array, anything else stays a string.
json loose_value(const std::string& text) {
    auto v = json::parse(text, nullptr, false);
    if (v.is_discarded()) {
        return text;
    }
    return v;
}

std::pair<std::string, json> split_assignment(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw CLI::ValidationError("expected key=value, got '" + kv + "'");
    }
    return {kv.substr(0, eq), loose_value(kv.substr(eq + 1))};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    app->add_option("-o,--output", c.output, "Write report.json, manifest.json and tables/*.csv here");
    app->add_option("--data-dir", c.data_dir, "Data directory (default: $MLAUDIT_DATA_DIR)");
    app->add_option("--format", c.format, "Console output")
        ->check(CLI::IsMember({"json", "tables", "both", "none"}))
        ->capture_default_str();
    app->add_option("--param", c.params, "Extra parameter key=value (repeatable)");
}

void add_dataset(CLI::App* app, DatasetOpts& d, bool required = true) {
    auto* o = app->add_option("--dataset", d.dataset, "CSV file (relative paths also looked up in the data dir)");
    if (required) {
        o->required();
    }
    app->add_option("--schema", d.schema, "Schema name or JSON path (default: file stem)");
    app->add_option("--features", d.features, "Comma-separated feature subset");
}

void add_model(CLI::App* app, ModelOpts& m, const char* help) {
    app->add_option("--model", m.model, help);
    app->add_option("--hyper", m.hyper, "Model hyperparameter key=value (repeatable)");
}

void put_dataset(json& p, const DatasetOpts& d) {
    if (!d.dataset.empty()) {
        p["dataset"] = d.dataset;
    }
    if (!d.schema.empty()) {
        p["schema"] = d.schema;
    }
    if (!d.features.empty()) {
        p["features"] = split_list(d.features);
    }
}

// A value naming an existing file (or ending in .json) is a saved model,
// anything else is a model kind to fit on the dataset.
void put_model(json& p, const ModelOpts& m, bool file_allowed) {
    if (m.model.empty() && m.hyper.empty()) {
        return;
    }
    if (file_allowed && !m.model.empty() && (fs::exists(m.model) || fs::path(m.model).extension() == ".json")) {
        p["model_file"] = m.model;
        return;
    }
    json spec{{"kind", m.model.empty() ? "forest" : m.model}};
    if (!m.hyper.empty()) {
        json h = json::object();
        for (const auto& kv : m.hyper) {
            auto [k, v] = split_assignment(kv);
            h[k] = v;
        }
        spec["hyperparams"] = h;
    }
    p["model"] = spec;
}

template <class T>
void put_if(json& p, const char* key, const std::optional<T>& v) {
    if (v) {
        p[key] = *v;
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void print_tables(const json& response) {
    for (const auto& [name, csv] : response.at("tables").items()) {
        std::cout << "# " << name << '\n' << csv.get<std::string>();
        if (!csv.get<std::string>().empty() && csv.get<std::string>().back() != '\n') {
            std::cout << '\n';
        }
    }
}

int emit(const std::string& text, const Common& c) {
    const json response = json::parse(text);
    if (!c.output.empty()) {
        const fs::path dir(c.output);
        fs::create_directories(dir / "tables");
        write_file(dir / "report.json", text);
        write_file(dir / "manifest.json", response.at("manifest").dump(2));
        for (const auto& [name, csv] : response.at("tables").items()) {
            write_file(dir / "tables" / (name + ".csv"), csv.get<std::string>());
        }
    }
    if (c.format == "tables" || c.format == "both") {
        print_tables(response);
    }
    if (c.format == "json" || c.format == "both") {
        std::cout << text << '\n';
    }
    const std::string status = response.value("status", "ok");
    if (status == "paradox-detected") {
        std::cerr << "mlaudit: paradox detected\n";
        return kParadox;
    }
    if (status == "empty-result") {
        std::cerr << "mlaudit: empty result\n";
    }
    return kOk;
}

int execute(const json& request, const Common& c) {
    char* out = nullptr;
    const mla_status s = mla_run_json(request.dump().c_str(), &out);
    if (s != MLA_OK) {
        std::cerr << "mlaudit: " << mla_status_name(s) << " error: " << mla_last_error() << '\n';
        return exit_code_for(s);
    }
    std::string text(out);
    mla_string_free(out);
    return emit(text, c);
}

json make_request(const std::string& command, const Common& c, json params) {
    for (const auto& kv : c.params) {
        auto [k, v] = split_assignment(kv);
        params[k] = v;
    }
    json req{{"command", command}, {"seed", c.seed}, {"params", params}};
    if (!c.data_dir.empty()) {
        req["data_dir"] = c.data_dir;
    }
    return req;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mlaudit: surrogate models, explanations and design search for structural data"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file; one [section] per subcommand, flags override file keys");
    app.set_version_flag("--version", std::string(mla_version()));

    Common common;
    DatasetOpts ds;
    ModelOpts model;
    json params = json::object();
    std::string command;

    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, common);
        s->callback([&command, name] { command = name; });
        return s;
    };

    // health / assoc
    for (const char* name : {"health", "assoc"}) {
        auto* s = sub(name, name == std::string("health") ? "Sample-size gates for a dataset"
                                                           : "Pearson, Spearman and mutual information matrices");
        add_dataset(s, ds);
    }

    // train
    std::string model_out;
    {
        auto* s = sub("train", "Fit a surrogate on the full dataset");
        add_dataset(s, ds);
        add_model(s, model, "Model kind: tree, forest, knn, linear, ridge");
        s->add_option("--model-out", model_out, "Save the fitted model as JSON");
    }

    // eval
    std::optional<std::size_t> folds;
    std::optional<std::size_t> repeats;
    bool importance = false;
    {
        auto* s = sub("eval", "Split + k-fold cross-validation with held-out metrics");
        add_dataset(s, ds);
        add_model(s, model, "Model kind");
        s->add_option("-k,--folds", folds, "Number of folds (default 10)");
        s->add_flag("--importance", importance, "Add Gini and permutation importance");
        s->add_option("--repeats", repeats, "Permutation repeats");
    }

    // explain
    std::string method = "shap";
    std::string rows;
    std::optional<double> epsilon;
    {
        auto* s = sub("explain", "SHAP or LIME attribution for one or more rows");
        add_dataset(s, ds);
        add_model(s, model, "Saved model JSON or a model kind to fit");
        s->add_option("--method", method)->check(CLI::IsMember({"shap", "lime", "both"}))->capture_default_str();
        s->add_option("--row", rows, "Row index, a-b range or 'all'");
    }

    // rashomon
    std::string expectations;
    {
        auto* s = sub("rashomon", "Sign disagreement between normalized SHAP and LIME");
        add_dataset(s, ds);
        add_model(s, model, "Saved model JSON or a model kind to fit");
        s->add_option("--rows", rows, "Row index, a-b range or 'all' (default)");
        s->add_option("--epsilon", epsilon, "Magnitude below which signs are ignored");
        s->add_option("--expectations", expectations, "Physics sign expectations JSON");
    }

    // abduce
    std::string constraints;
    std::string configs;
    std::optional<double> target_fr;
    std::optional<double> fr_max;
    std::optional<std::size_t> n;
    std::optional<std::size_t> top_k;
    {
        auto* s = sub("abduce", "Screen sampled designs against a target and rank the top k");
        add_dataset(s, ds, false);
        add_model(s, model, "Saved model JSON or a model kind to fit on --dataset");
        s->add_option("--constraints", constraints, "Grid constraint JSON");
        s->add_option("--configs", configs, "Candidate configs JSON instead of sampling");
        s->add_option("--target-fr", target_fr, "Target fire resistance in minutes (default 120)");
        s->add_option("--fr-max", fr_max, "Feasibility normalization ceiling");
        s->add_option("-n,--samples", n, "Number of sampled configs (default 100000)");
        s->add_option("-k,--top", top_k, "Rows in the top table (default 5)");
    }

    // cluster / hypothesize
    std::string k_text;
    std::optional<std::size_t> k_min;
    std::optional<std::size_t> k_max;
    bool include_target = false;
    std::string cluster_id;
    std::optional<double> scale;
    {
        auto* s = sub("cluster", "k-means with silhouette-based k selection and cluster profiles");
        add_dataset(s, ds);
        s->add_option("-k", k_text, "Number of clusters or 'auto' (default)");
        s->add_option("--k-min", k_min);
        s->add_option("--k-max", k_max);
        s->add_flag("--include-target", include_target, "Cluster on features plus target");

        auto* h = sub("hypothesize", "Perturb around a cluster centroid to propose new designs");
        add_dataset(h, ds);
        h->add_option("--constraints", constraints, "Grid constraint JSON");
        h->add_option("--cluster", cluster_id, "Cluster index or 'best' (default)");
        h->add_option("-n,--samples", n, "Number of hypotheses (default 1000)");
        h->add_option("--scale", scale, "Perturbation scale in feature std units (default 0.15)");
        h->add_option("-k", k_text, "Number of clusters or 'auto'");
    }

    // optimize
    std::string space;
    std::string catalog;
    std::optional<double> r_limit;
    std::optional<std::size_t> budget;
    {
        auto* s = sub("optimize", "Fire resistance vs volume Pareto search with catalog check");
        s->add_option("--space", space, "Design space JSON");
        s->add_option("--catalog", catalog, "Section catalog CSV or 'exhaustive'");
        s->add_option("--r-limit", r_limit, "Minimum fire resistance in minutes (default 120)");
        s->add_option("--budget", budget, "Sampled designs (default 100000)");
    }

    // symreg
    std::string target;
    std::optional<std::size_t> population;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> max_nodes;
    {
        auto* s = sub("symreg", "Genetic-programming symbolic regression");
        add_dataset(s, ds);
        s->add_option("--target", target, "Target column (must match the schema)");
        s->add_option("--population", population);
        s->add_option("--generations", generations);
        s->add_option("--max-nodes", max_nodes);
    }

    // formula
    std::string formula_name;
    std::vector<std::string> formula_values;
    auto* formula = app.add_subcommand("formula", "Closed-form design expressions");
    formula->require_subcommand(1);
    {
        auto* e = formula->add_subcommand("eval", "Evaluate a formula");
        add_common(e, common);
        e->add_option("name", formula_name, "Formula id")->required();
        e->add_option("values", formula_values, "symbol=value pairs");
        e->callback([&] { command = "formula"; });
        auto* l = formula->add_subcommand("list", "List formulas");
        add_common(l, common);
        l->callback([&] { command = "formula"; });
    }

    // pipeline
    std::string pipeline_name;
    {
        auto* s = sub("pipeline", "Case-study pipelines: induction, abduction, rashomon, optimize");
        s->add_option("name", pipeline_name)
            ->required()
            ->check(CLI::IsMember({"induction", "abduction", "rashomon", "optimize"}));
        add_dataset(s, ds, false);
        add_model(s, model, "Saved model JSON or a model kind");
        s->add_option("--constraints", constraints);
        s->add_option("--target-fr", target_fr);
        s->add_option("--space", space);
        s->add_option("--catalog", catalog);
        s->add_option("--r-limit", r_limit);
        s->add_option("--budget", budget);
        s->add_option("--population", population);
        s->add_option("--generations", generations);
        s->add_option("-n,--samples", n);
    }

    // replay
    std::string manifest_path;
    std::string verify_path;
    {
        auto* s = app.add_subcommand("replay", "Re-run a manifest.json");
        add_common(s, common);
        s->add_option("manifest", manifest_path)->required()->check(CLI::ExistingFile);
        s->add_option("--verify", verify_path, "Compare against this report.json byte for byte")
            ->check(CLI::ExistingFile);
        s->callback([&] { command = "replay"; });
    }

    try {
        app.parse(argc, argv);

        if (command == "replay") {
            std::ifstream in(manifest_path, std::ios::binary);
            const json manifest = json::parse(in);
            char* out = nullptr;
            const mla_status s = mla_run_json(manifest.dump().c_str(), &out);
            if (s != MLA_OK) {
                std::cerr << "mlaudit: " << mla_status_name(s) << " error: " << mla_last_error() << '\n';
                return exit_code_for(s);
            }
            std::string text(out);
            mla_string_free(out);
            if (!verify_path.empty()) {
                std::ifstream ref(verify_path, std::ios::binary);
                std::stringstream buf;
                buf << ref.rdbuf();
                if (buf.str() != text) {
                    std::cerr << "mlaudit: replay differs from " << verify_path << '\n';
                    return kInternal;
                }
                std::cerr << "mlaudit: replay identical\n";
            }
            return emit(text, common);
        }

        put_dataset(params, ds);
        if (command == "train") {
            put_model(params, model, false);
            if (!model_out.empty()) {
                params["model_out"] = model_out;
            }
        } else if (command == "eval") {
            put_model(params, model, false);
            put_if(params, "k", folds);
            put_if(params, "repeats", repeats);
            if (importance) {
                params["importance"] = true;
            }
        } else if (command == "explain" || command == "rashomon") {
            put_model(params, model, true);
            if (command == "explain") {
                params["method"] = method;
                if (!rows.empty()) {
                    params["row"] = rows;
                }
            } else {
                if (!rows.empty()) {
                    params["rows"] = rows;
                }
                put_if(params, "epsilon", epsilon);
                if (!expectations.empty()) {
                    params["expectations"] = expectations;
                }
            }
        } else if (command == "abduce") {
            put_model(params, model, true);
            if (!constraints.empty()) {
                params["constraints"] = constraints;
            }
            if (!configs.empty()) {
                params["configs"] = configs;
            }
            put_if(params, "target_fr", target_fr);
            put_if(params, "fr_max", fr_max);
            put_if(params, "n", n);
            put_if(params, "k", top_k);
        } else if (command == "cluster" || command == "hypothesize") {
            if (!k_text.empty()) {
                params["k"] = loose_value(k_text);
            }
            put_if(params, "k_min", k_min);
            put_if(params, "k_max", k_max);
            if (include_target) {
                params["include_target"] = true;
            }
            if (command == "hypothesize") {
                if (!constraints.empty()) {
                    params["constraints"] = constraints;
                }
                if (!cluster_id.empty()) {
                    params["cluster"] = loose_value(cluster_id);
                }
                put_if(params, "n", n);
                put_if(params, "scale", scale);
            }
        } else if (command == "optimize" || command == "pipeline") {
            if (!space.empty()) {
                params["space"] = space;
            }
            if (!catalog.empty()) {
                params["catalog"] = catalog;
            }
            put_if(params, "r_limit", r_limit);
            put_if(params, "budget", budget);
            if (command == "pipeline") {
                params["name"] = pipeline_name;
                put_model(params, model, true);
                if (!constraints.empty()) {
                    params["constraints"] = constraints;
                }
                put_if(params, "target_fr", target_fr);
                put_if(params, "population", population);
                put_if(params, "generations", generations);
                put_if(params, "n", n);
            }
        } else if (command == "symreg") {
            if (!target.empty()) {
                params["target"] = target;
            }
            put_if(params, "population", population);
            put_if(params, "generations", generations);
            put_if(params, "max_nodes", max_nodes);
        } else if (command == "formula") {
            if (!formula_name.empty()) {
                params["name"] = formula_name;
                json values = json::object();
                for (const auto& kv : formula_values) {
                    auto [k, v] = split_assignment(kv);
                    values[k] = v;
                }
                params["values"] = values;
            }
        }
        return execute(make_request(command, common, params), common);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "mlaudit: malformed JSON: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "mlaudit: " << e.what() << '\n';
        return kInternal;
    }
}
