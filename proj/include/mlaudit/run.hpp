// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <filesystem>
#include <string>

namespace mlaudit {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

/// Executes one command. The request is
///   {"command": name, "seed": n, "params": {...}, "data_dir": optional path}
/// and the response is
///   {"schema_version": 1, "status": "ok" | "paradox-detected" | "empty-result",
///    "manifest": {...}, "report": {...}, "tables": {name: csv text}}.
/// Feeding the manifest back as a request reproduces the same response.
/// Throws mlaudit::Error on failure.
std::string run_json(const std::string& request_json);

/// $MLAUDIT_DATA_DIR when set, otherwise the data directory of the source tree.
std::filesystem::path default_data_dir();

} // namespace mlaudit
