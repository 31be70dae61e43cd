/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The mlaudit Authors
 *
 * C interface. Every call returns an mla_status; on failure the message is
 * available from mla_last_error() until the next call on the same thread.
 * Strings returned through `char**` are owned by the caller and released
 * with mla_string_free.
 */
#ifndef MLAUDIT_MLAUDIT_H
#define MLAUDIT_MLAUDIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MLA_API __declspec(dllexport)
#else
#define MLA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mla_status {
    MLA_OK = 0,
    MLA_INVALID_ARGUMENT = 1,
    MLA_SCHEMA = 2,
    MLA_PARSE = 3,
    MLA_VALIDATION = 4,
    MLA_DOMAIN = 5,
    MLA_DEGENERATE = 6,
    MLA_UNSUPPORTED = 7,
    MLA_IO = 8,
    MLA_INTERNAL = 9
} mla_status;

typedef struct mla_dataset mla_dataset;
typedef struct mla_model mla_model;

MLA_API const char* mla_version(void);
MLA_API const char* mla_last_error(void);
MLA_API const char* mla_status_name(mla_status status);
MLA_API void mla_string_free(char* s);

/* Datasets. `schema_path` may be NULL to use <data_dir>/schemas/<stem>.json. */
MLA_API mla_status mla_dataset_load(const char* csv_path, const char* schema_path, mla_dataset** out);
MLA_API void mla_dataset_free(mla_dataset* d);
MLA_API size_t mla_dataset_rows(const mla_dataset* d);
MLA_API size_t mla_dataset_features(const mla_dataset* d);
MLA_API mla_status mla_dataset_feature_name(const mla_dataset* d, size_t index, const char** out);
MLA_API mla_status mla_health_json(const mla_dataset* d, char** out);
MLA_API mla_status mla_association_json(const mla_dataset* d, char** out);

/* Models. `spec_json` is a kind name ("forest") or {"kind", "hyperparams", "seed"}. */
MLA_API mla_status mla_model_fit(const char* spec_json, const mla_dataset* d, mla_model** out);
MLA_API mla_status mla_model_load(const char* path, mla_model** out);
MLA_API mla_status mla_model_save(const mla_model* m, const char* path);
MLA_API void mla_model_free(mla_model* m);
MLA_API size_t mla_model_features(const mla_model* m);
/* `x` is row-major n_rows x mla_model_features(m); `out` receives n_rows values. */
MLA_API mla_status mla_model_predict(const mla_model* m, const double* x, size_t n_rows, double* out);

MLA_API mla_status mla_cross_validate_json(const char* spec_json, const mla_dataset* d, size_t k, uint64_t seed,
                                           char** out);
/* `inputs_json` maps symbol names to values. */
MLA_API mla_status mla_formula_eval_json(const char* name, const char* inputs_json, char** out);

/* Generic command entry point, see run.hpp for the request format. */
MLA_API mla_status mla_run_json(const char* request_json, char** out);

#ifdef __cplusplus
}
#endif

#endif
