// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace mlaudit {

bool operator==(const ExprNode& a, const ExprNode& b) {
    if (a.op != b.op) {
        return false;
    }
    if (a.op == Op::Const) {
        return a.value == b.value;
    }
    if (a.op == Op::Var) {
        return a.feature == b.feature;
    }
    return true;
}

bool operator==(const ExpressionTree& a, const ExpressionTree& b) { return a.nodes_ == b.nodes_; }

ExpressionTree::ExpressionTree(std::vector<ExprNode> nodes) : nodes_(std::move(nodes)) {
    if (!well_formed()) {
        fail(ErrorKind::InvalidArgument, "malformed expression arena");
    }
}

ExpressionTree ExpressionTree::constant(double v) {
    ExpressionTree t;
    t.nodes_.push_back({Op::Const, v, -1});
    return t;
}

ExpressionTree ExpressionTree::variable(int feature) {
    ExpressionTree t;
    t.nodes_.push_back({Op::Var, 0.0, feature});
    return t;
}

std::size_t ExpressionTree::subtree_end(std::size_t i) const {
    std::size_t need = 1;
    while (need > 0) {
        need += static_cast<std::size_t>(arity(nodes_[i].op));
        --need;
        ++i;
    }
    return i;
}

std::vector<std::size_t> ExpressionTree::children(std::size_t i) const {
    std::vector<std::size_t> out;
    std::size_t c = i + 1;
    for (int k = 0; k < arity(nodes_[i].op); ++k) {
        out.push_back(c);
        c = subtree_end(c);
    }
    return out;
}

bool ExpressionTree::well_formed() const {
    if (nodes_.empty()) {
        return false;
    }
    std::size_t need = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (need == 0) {
            return false;
        }
        need = need - 1 + static_cast<std::size_t>(arity(nodes_[i].op));
        if (nodes_[i].op == Op::Var && nodes_[i].feature < 0) {
            return false;
        }
    }
    return need == 0;
}

ExpressionTree ExpressionTree::replace_subtree(std::size_t i, const ExpressionTree& replacement) const {
    ExpressionTree out;
    const std::size_t end = subtree_end(i);
    out.nodes_.reserve(nodes_.size() - (end - i) + replacement.size());
    out.nodes_.insert(out.nodes_.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
    out.nodes_.insert(out.nodes_.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    out.nodes_.insert(out.nodes_.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return out;
}

ExpressionTree ExpressionTree::subtree(std::size_t i) const {
    ExpressionTree out;
    out.nodes_.assign(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                      nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i)));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double protect(double v) {
    if (std::isnan(v)) {
        return 0.0;
    }
    return std::clamp(v, -kExprClamp, kExprClamp);
}

double apply(Op op, double a, double b) {
    switch (op) {
    case Op::Add: return protect(a + b);
    case Op::Sub: return protect(a - b);
    case Op::Mul: return protect(a * b);
    case Op::Div: return b == 0.0 ? 1.0 : protect(a / b);
    case Op::Pow:
        if (a < 0.0 && std::floor(b) != b) {
            return 0.0;
        }
        if (a == 0.0 && b < 0.0) {
            return kExprClamp;
        }
        return protect(std::pow(a, b));
    case Op::Sqrt: return a < 0.0 ? 0.0 : std::sqrt(a);
    case Op::Exp: return protect(std::exp(a));
    case Op::Log: return a <= 0.0 ? 0.0 : std::log(a);
    case Op::Abs: return std::abs(a);
    default: return 0.0;
    }
}

double eval_at(const std::vector<ExprNode>& nodes, std::size_t& i, std::span<const double> row) {
    const ExprNode& n = nodes[i++];
    switch (n.op) {
    case Op::Const: return protect(n.value);
    case Op::Var: {
        const auto f = static_cast<std::size_t>(n.feature);
        if (f >= row.size()) {
            fail(ErrorKind::InvalidArgument, "expression references feature " + std::to_string(f) +
                                                 " but the row has " + std::to_string(row.size()) + " values");
        }
        return protect(row[f]);
    }
    default: break;
    }
    const double a = eval_at(nodes, i, row);
    if (arity(n.op) == 1) {
        return apply(n.op, a, 0.0);
    }
    const double b = eval_at(nodes, i, row);
    return apply(n.op, a, b);
}

} // namespace

double eval_expression(const ExpressionTree& t, std::span<const double> row) {
    if (t.empty()) {
        fail(ErrorKind::InvalidArgument, "empty expression");
    }
    std::size_t i = 0;
    return eval_at(t.nodes(), i, row);
}

std::size_t complexity(const ExpressionTree& t) { return t.size(); }

// ---------------------------------------------------------------------------

namespace {

std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), ptr);
    return v < 0.0 ? "(" + s + ")" : s;
}

const char* symbol(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Abs: return "abs";
    default: return "?";
    }
}

void write(const std::vector<ExprNode>& nodes, std::size_t& i, const std::vector<std::string>& names,
           std::string& out) {
    const ExprNode& n = nodes[i++];
    switch (n.op) {
    case Op::Const: out += format_number(n.value); return;
    case Op::Var: {
        const auto f = static_cast<std::size_t>(n.feature);
        out += f < names.size() ? names[f] : "x" + std::to_string(f);
        return;
    }
    default: break;
    }
    if (arity(n.op) == 1) {
        out += symbol(n.op);
        out += '(';
        write(nodes, i, names, out);
        out += ')';
        return;
    }
    out += '(';
    write(nodes, i, names, out);
    out += ' ';
    out += symbol(n.op);
    out += ' ';
    write(nodes, i, names, out);
    out += ')';
}

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& names) : text_(text), names_(names) {}

    ExpressionTree run() {
        std::vector<ExprNode> out = expr();
        skip_space();
        if (pos_ < text_.size()) {
            throw ExpressionParseError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return ExpressionTree(std::move(out));
    }

private:
    using Nodes = std::vector<ExprNode>;

    static Nodes binary(Op op, Nodes a, const Nodes& b) {
        Nodes out;
        out.reserve(1 + a.size() + b.size());
        out.push_back({op, 0.0, -1});
        out.insert(out.end(), a.begin(), a.end());
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ExpressionParseError(pos_, std::string("expected '") + c + "'");
        }
    }

    Nodes expr() {
        Nodes lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = binary(Op::Add, std::move(lhs), term());
            } else if (accept('-')) {
                lhs = binary(Op::Sub, std::move(lhs), term());
            } else {
                return lhs;
            }
        }
    }

    Nodes term() {
        Nodes lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary(Op::Mul, std::move(lhs), unary());
            } else if (accept('/')) {
                lhs = binary(Op::Div, std::move(lhs), unary());
            } else {
                return lhs;
            }
        }
    }

    Nodes unary() {
        if (accept('-')) {
            Nodes operand = unary();
            if (operand.size() == 1 && operand[0].op == Op::Const) {
                operand[0].value = -operand[0].value;
                return operand;
            }
            return binary(Op::Mul, Nodes{{Op::Const, -1.0, -1}}, operand);
        }
        return power();
    }

    Nodes power() {
        Nodes base = primary();
        if (accept('^')) {
            return binary(Op::Pow, std::move(base), unary());
        }
        return base;
    }

    Nodes primary() {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ExpressionParseError(pos_, "unexpected end of expression");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Nodes inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            double v = 0.0;
            const char* begin = text_.data() + pos_;
            auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), v);
            if (ec != std::errc{}) {
                throw ExpressionParseError(pos_, "malformed number");
            }
            pos_ += static_cast<std::size_t>(ptr - begin);
            return {{Op::Const, v, -1}};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string word(text_.substr(start, pos_ - start));
            for (std::size_t f = 0; f < names_.size(); ++f) {
                if (names_[f] == word) {
                    return {{Op::Var, 0.0, static_cast<int>(f)}};
                }
            }
            static const std::array<std::pair<const char*, Op>, 4> functions{
                {{"sqrt", Op::Sqrt}, {"exp", Op::Exp}, {"log", Op::Log}, {"abs", Op::Abs}}};
            for (const auto& [name, op] : functions) {
                if (word == name) {
                    expect('(');
                    Nodes arg = expr();
                    expect(')');
                    Nodes out{{op, 0.0, -1}};
                    out.insert(out.end(), arg.begin(), arg.end());
                    return out;
                }
            }
            throw ExpressionParseError(start, "unknown identifier '" + word + "'");
        }
        throw ExpressionParseError(pos_, "unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    const std::vector<std::string>& names_;
    std::size_t pos_ = 0;
};

} // namespace

std::string expression_to_string(const ExpressionTree& t, const std::vector<std::string>& feature_names) {
    std::string out;
    std::size_t i = 0;
    if (!t.empty()) {
        write(t.nodes(), i, feature_names, out);
    }
    return out;
}

ExpressionTree parse_expression(std::string_view text, const std::vector<std::string>& feature_names) {
    return Parser(text, feature_names).run();
}

} // namespace mlaudit
