#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gauge/rational.hpp"

namespace gauge {

/// Syntax error in an expression; `column` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t column, const std::string& message);
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

/// Evaluation left the domain (log or sqrt of a negative, division by zero,
/// non-integer power of a negative base, overflow).
class EvalError : public std::domain_error {
public:
    EvalError(std::string subexpression, const std::string& message);
    [[nodiscard]] const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

struct ExprNode;

/// Immutable expression AST over variables x (= x1), x2, ..., x9.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' atom)?
///   atom   := NUMBER | VAR | FUNC '(' args ')' | '(' expr ')'
///           | 'ite' '(' VAR '<' ['-'] NUMBER ',' expr ',' expr ')'
/// NUMBER is a decimal or a contiguous rational "p/q", except directly after
/// '^' where "x^2/2" means (x^2)/2; write x^(1/2) for a fractional power.
/// FUNC is one of sin cos exp log sqrt abs (one argument) or min max (two
/// arguments).
/// There is no implicit multiplication: "2x" is rejected at column 2.
class Expr {
public:
    static Expr parse(std::string_view text);
    static Expr constant(const Rational& value);

    [[nodiscard]] double eval(std::span<const double> x) const;
    [[nodiscard]] double eval(double x) const { return eval(std::span<const double>(&x, 1)); }
    /// Exact value when the expression only uses + - * /, integer powers,
    /// abs, min, max and ite; nullopt otherwise or on division by zero.
    [[nodiscard]] std::optional<Rational> eval_exact(std::span<const Rational> x) const;

    /// Canonical, fully parenthesised text; parse(str()) reproduces the AST.
    [[nodiscard]] std::string str() const;
    /// One more than the largest variable index used (0 for constants).
    [[nodiscard]] std::size_t dimension() const;

private:
    explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}
    std::shared_ptr<const ExprNode> root_;
};

}  // namespace gauge
