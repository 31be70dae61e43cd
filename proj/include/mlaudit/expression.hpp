// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlaudit/error.hpp"

namespace mlaudit {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Sqrt, Exp, Log, Abs };

constexpr int arity(Op op) noexcept {
    switch (op) {
    case Op::Const:
    case Op::Var: return 0;
    case Op::Sqrt:
    case Op::Exp:
    case Op::Log:
    case Op::Abs: return 1;
    default: return 2;
    }
}

struct ExprNode {
    Op op = Op::Const;
    double value = 0.0;  // Const
    int feature = -1;    // Var
};

/// Expression stored as a node arena in prefix order: every node is followed
/// by its first child's subtree, then its second child's. Subtrees are
/// therefore contiguous ranges, which keeps crossover and mutation simple.
class ExpressionTree {
public:
    ExpressionTree() = default;
    explicit ExpressionTree(std::vector<ExprNode> nodes);

    static ExpressionTree constant(double v);
    static ExpressionTree variable(int feature);

    [[nodiscard]] const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
    std::vector<ExprNode>& mutable_nodes() noexcept { return nodes_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }

    /// One past the last node of the subtree rooted at `i`.
    [[nodiscard]] std::size_t subtree_end(std::size_t i) const;
    /// Child node indices of node `i`.
    [[nodiscard]] std::vector<std::size_t> children(std::size_t i) const;
    /// True when arities are consistent and the arena holds exactly one tree.
    [[nodiscard]] bool well_formed() const;

    /// Copy of this tree with the subtree at `i` replaced by `replacement`.
    [[nodiscard]] ExpressionTree replace_subtree(std::size_t i, const ExpressionTree& replacement) const;
    [[nodiscard]] ExpressionTree subtree(std::size_t i) const;

    friend bool operator==(const ExpressionTree& a, const ExpressionTree& b);

private:
    std::vector<ExprNode> nodes_;
};

bool operator==(const ExprNode& a, const ExprNode& b);

constexpr double kExprClamp = 1e12;

/// Protected evaluation: x/0 = 1, log(x <= 0) = 0, sqrt(x < 0) = 0, a negative
/// base with a non-integer exponent gives 0, and every intermediate result is
/// clamped to +-1e12 (NaN becomes 0). The result is always finite.
double eval_expression(const ExpressionTree& t, std::span<const double> row);

/// Total node count.
std::size_t complexity(const ExpressionTree& t);

/// Fully parenthesised infix text, e.g. "(x + 1)", "sqrt(x)", "(-3.5)".
/// Constants use the shortest round-trip decimal form.
std::string expression_to_string(const ExpressionTree& t, const std::vector<std::string>& feature_names);

class ExpressionParseError : public Error {
public:
    ExpressionParseError(std::size_t position, const std::string& message)
        : Error(ErrorKind::Parse, message + " at position " + std::to_string(position)), position_(position) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Infix parser: + - * / ^ (right-associative), unary minus, parentheses,
/// sqrt/exp/log/abs calls, numbers and feature names.
ExpressionTree parse_expression(std::string_view text, const std::vector<std::string>& feature_names);

} // namespace mlaudit
