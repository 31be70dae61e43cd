// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlaudit {

enum class ErrorKind {
    InvalidArgument,  // precondition / usage
    Schema,           // dataset does not match its schema
    Parse,            // malformed text input
    Validation,       // parsed value violates a data invariant
    Domain,           // formula or numeric domain violation
    Degenerate,       // statistically undefined (e.g. constant actuals in R^2)
    Unsupported,      // operation not available for this model kind
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Cell-level parse failure. Row is the 1-based data row (header excluded).
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::string column, const std::string& message)
        : Error(ErrorKind::Parse, message), row_(row), column_(std::move(column)) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw Error(ErrorKind::InvalidArgument, message);
    }
}

} // namespace mlaudit
