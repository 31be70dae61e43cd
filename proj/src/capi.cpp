// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/mlaudit.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/model.hpp"
#include "mlaudit/run.hpp"
#include "mlaudit/validation.hpp"
#include "report_json.hpp"

struct mla_dataset {
    mlaudit::Dataset data;
};

struct mla_model {
    mlaudit::TrainedModel model;
};

namespace {

thread_local std::string g_last_error;

mla_status status_of(mlaudit::ErrorKind kind) {
    using mlaudit::ErrorKind;
    switch (kind) {
    case ErrorKind::InvalidArgument: return MLA_INVALID_ARGUMENT;
    case ErrorKind::Schema: return MLA_SCHEMA;
    case ErrorKind::Parse: return MLA_PARSE;
    case ErrorKind::Validation: return MLA_VALIDATION;
    case ErrorKind::Domain: return MLA_DOMAIN;
    case ErrorKind::Degenerate: return MLA_DEGENERATE;
    case ErrorKind::Unsupported: return MLA_UNSUPPORTED;
    case ErrorKind::Io: return MLA_IO;
    }
    return MLA_INTERNAL;
}

template <class F>
mla_status guarded(F&& f) {
    g_last_error.clear();
    try {
        f();
        return MLA_OK;
    } catch (const mlaudit::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("malformed JSON: ") + e.what();
        return MLA_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MLA_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MLA_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MLA_INTERNAL;
    }
}

void require_ptr(const void* p, const char* what) {
    mlaudit::require(p != nullptr, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mlaudit::ModelSpec spec_from(const char* spec_json) {
    const std::string text(spec_json);
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        j = text;  // bare kind name
    }
    return mlaudit::detail::model_spec_from(j, 42);
}

} // namespace

extern "C" {

const char* mla_version(void) { return mlaudit::kVersion; }

const char* mla_last_error(void) { return g_last_error.c_str(); }

const char* mla_status_name(mla_status status) {
    switch (status) {
    case MLA_OK: return "ok";
    case MLA_INVALID_ARGUMENT: return "invalid-argument";
    case MLA_SCHEMA: return "schema";
    case MLA_PARSE: return "parse";
    case MLA_VALIDATION: return "validation";
    case MLA_DOMAIN: return "domain";
    case MLA_DEGENERATE: return "degenerate";
    case MLA_UNSUPPORTED: return "unsupported";
    case MLA_IO: return "io";
    case MLA_INTERNAL: return "internal";
    }
    return "unknown";
}

void mla_string_free(char* s) { std::free(s); }

mla_status mla_dataset_load(const char* csv_path, const char* schema_path, mla_dataset** out) {
    return guarded([&] {
        require_ptr(csv_path, "csv_path");
        require_ptr(out, "out");
        *out = nullptr;
        const std::filesystem::path csv(csv_path);
        const std::filesystem::path schema = schema_path != nullptr
            ? std::filesystem::path(schema_path)
            : mlaudit::default_data_dir() / "schemas" / (csv.stem().string() + ".json");
        auto d = mlaudit::load_dataset(csv, mlaudit::load_schema(schema));
        *out = new mla_dataset{std::move(d)};
    });
}

void mla_dataset_free(mla_dataset* d) { delete d; }

size_t mla_dataset_rows(const mla_dataset* d) { return d == nullptr ? 0 : d->data.n_rows(); }

size_t mla_dataset_features(const mla_dataset* d) { return d == nullptr ? 0 : d->data.n_features(); }

mla_status mla_dataset_feature_name(const mla_dataset* d, size_t index, const char** out) {
    return guarded([&] {
        require_ptr(d, "dataset");
        require_ptr(out, "out");
        mlaudit::require(index < d->data.n_features(), "feature index out of range");
        *out = d->data.features()[index].name.c_str();
    });
}

mla_status mla_health_json(const mla_dataset* d, char** out) {
    return guarded([&] {
        require_ptr(d, "dataset");
        require_ptr(out, "out");
        *out = dup_string(mlaudit::detail::to_json(mlaudit::health_check(d->data)).dump());
    });
}

mla_status mla_association_json(const mla_dataset* d, char** out) {
    return guarded([&] {
        require_ptr(d, "dataset");
        require_ptr(out, "out");
        *out = dup_string(mlaudit::detail::to_json(mlaudit::association_matrices(d->data)).dump());
    });
}

mla_status mla_model_fit(const char* spec_json, const mla_dataset* d, mla_model** out) {
    return guarded([&] {
        require_ptr(spec_json, "spec_json");
        require_ptr(d, "dataset");
        require_ptr(out, "out");
        *out = nullptr;
        auto m = mlaudit::fit(spec_from(spec_json), d->data);
        *out = new mla_model{std::move(m)};
    });
}

mla_status mla_model_load(const char* path, mla_model** out) {
    return guarded([&] {
        require_ptr(path, "path");
        require_ptr(out, "out");
        *out = nullptr;
        auto m = mlaudit::load_model(path);
        *out = new mla_model{std::move(m)};
    });
}

mla_status mla_model_save(const mla_model* m, const char* path) {
    return guarded([&] {
        require_ptr(m, "model");
        require_ptr(path, "path");
        mlaudit::save_model(m->model, path);
    });
}

void mla_model_free(mla_model* m) { delete m; }

size_t mla_model_features(const mla_model* m) { return m == nullptr ? 0 : m->model.n_features(); }

mla_status mla_model_predict(const mla_model* m, const double* x, size_t n_rows, double* out) {
    return guarded([&] {
        require_ptr(m, "model");
        if (n_rows == 0) {
            return;
        }
        require_ptr(x, "x");
        require_ptr(out, "out");
        const std::size_t p = m->model.n_features();
        for (std::size_t i = 0; i < n_rows; ++i) {
            out[i] = m->model.predict_row({x + i * p, p});
        }
    });
}

mla_status mla_cross_validate_json(const char* spec_json, const mla_dataset* d, size_t k, uint64_t seed,
                                   char** out) {
    return guarded([&] {
        require_ptr(spec_json, "spec_json");
        require_ptr(d, "dataset");
        require_ptr(out, "out");
        const auto rep = mlaudit::cross_validate(spec_from(spec_json), d->data, k, seed);
        *out = dup_string(mlaudit::detail::to_json(rep).dump());
    });
}

mla_status mla_formula_eval_json(const char* name, const char* inputs_json, char** out) {
    return guarded([&] {
        require_ptr(name, "name");
        require_ptr(out, "out");
        nlohmann::json req{{"command", "formula"}, {"seed", 0}, {"params", {{"name", name}}}};
        if (inputs_json != nullptr) {
            req["params"]["values"] = nlohmann::json::parse(inputs_json);
        }
        const auto resp = nlohmann::json::parse(mlaudit::run_json(req.dump()));
        *out = dup_string(resp.at("report").dump());
    });
}

mla_status mla_run_json(const char* request_json, char** out) {
    return guarded([&] {
        require_ptr(request_json, "request_json");
        require_ptr(out, "out");
        *out = dup_string(mlaudit::run_json(request_json));
    });
}

} // extern "C"
