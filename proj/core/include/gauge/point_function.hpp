#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "gauge/expr.hpp"
#include "gauge/rational.hpp"

namespace gauge {

/// Real function of a point, backed by an expression, a catalog builtin or
/// an arbitrary callable. Cheap to copy; immutable.
///
/// Builtins (all one-dimensional, singular points carry declared values):
///   hk_primitive   x^2 sin(x^-2), 0 at 0
///   hk_derivative  2x sin(x^-2) - (2/x) cos(x^-2), 0 at 0
///   inv_sqrt       x^-1/2 for x > 0, 0 at 0
///   heaviside_c    0 for x < c, 1 for x >= c (c rational, e.g. heaviside_1/2)
class PointFunction {
public:
    using Fn = std::function<double(std::span<const double>)>;

    /// Builtin name or expression text.
    static PointFunction parse(std::string_view text);
    static PointFunction from_expr(const Expr& e);
    static std::optional<PointFunction> builtin(std::string_view name);
    static PointFunction from_callable(Fn fn, std::string name, std::size_t dimension = 1);
    static PointFunction from_callable_1d(std::function<double(double)> fn, std::string name);
    static PointFunction constant(double value);

    double operator()(std::span<const double> x) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
    [[nodiscard]] std::optional<Rational> eval_exact(std::span<const Rational> x) const;

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] const Expr* expr() const { return expr_.get(); }

private:
    PointFunction(Fn fn, std::string name, std::size_t dimension, std::shared_ptr<const Expr> expr)
        : fn_(std::move(fn)), name_(std::move(name)), dimension_(dimension), expr_(std::move(expr)) {}

    Fn fn_;
    std::string name_;
    std::size_t dimension_;
    std::shared_ptr<const Expr> expr_;
};

// Pointwise combinators used by the calculus checks.
PointFunction operator+(const PointFunction& a, const PointFunction& b);
PointFunction operator-(const PointFunction& a, const PointFunction& b);
PointFunction operator*(const PointFunction& a, const PointFunction& b);
PointFunction scale(const PointFunction& a, double c);
/// outer(inner(x)) for one-dimensional functions.
PointFunction compose(const PointFunction& outer, const PointFunction& inner);

}  // namespace gauge
