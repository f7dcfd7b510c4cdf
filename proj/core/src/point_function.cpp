#include "gauge/point_function.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace gauge {

namespace {

double hk_primitive(double x) {
    if (x == 0.0) return 0.0;
    return x * x * std::sin(1.0 / (x * x));
}

double hk_derivative(double x) {
    if (x == 0.0) return 0.0;
    const double u = 1.0 / (x * x);
    return 2.0 * x * std::sin(u) - 2.0 / x * std::cos(u);
}

double first(std::span<const double> x, const std::string& name) {
    if (x.empty()) throw EvalError(name, "point has no coordinates");
    return x[0];
}

}  // namespace

std::optional<PointFunction> PointFunction::builtin(std::string_view name) {
    const std::string n(name);
    if (name == "hk_primitive")
        return from_callable([n](std::span<const double> x) { return hk_primitive(first(x, n)); }, n, 1);
    if (name == "hk_derivative")
        return from_callable([n](std::span<const double> x) { return hk_derivative(first(x, n)); }, n, 1);
    if (name == "inv_sqrt")
        return from_callable(
            [n](std::span<const double> x) {
                const double t = first(x, n);
                if (t < 0.0) throw EvalError(n, "inv_sqrt of a negative number");
                return t == 0.0 ? 0.0 : 1.0 / std::sqrt(t);
            },
            n, 1);
    if (name.rfind("heaviside_", 0) == 0) {
        const Rational c = Rational::parse(name.substr(10));
        const std::string canonical = "heaviside_" + c.str();
        const double cd = c.to_double();
        // Compare exactly so that x == c is decided without rounding.
        return PointFunction(
            [c, cd](std::span<const double> x) {
                const double t = first(x, "heaviside");
                if (t != cd) return t < cd ? 0.0 : 1.0;
                return cmp(c.raw(), t) > 0 ? 0.0 : 1.0;
            },
            canonical, 1, nullptr);
    }
    return std::nullopt;
}

PointFunction PointFunction::parse(std::string_view text) {
    std::string trimmed(text);
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.erase(trimmed.begin());
    if (auto b = builtin(trimmed)) return *b;
    return from_expr(Expr::parse(trimmed));
}

PointFunction PointFunction::from_expr(const Expr& e) {
    auto shared = std::make_shared<const Expr>(e);
    const std::size_t dim = std::max<std::size_t>(1, e.dimension());
    return PointFunction([shared](std::span<const double> x) { return shared->eval(x); }, e.str(), dim, shared);
}

PointFunction PointFunction::from_callable(Fn fn, std::string name, std::size_t dimension) {
    return PointFunction(std::move(fn), std::move(name), dimension, nullptr);
}

PointFunction PointFunction::from_callable_1d(std::function<double(double)> fn, std::string name) {
    return PointFunction([fn = std::move(fn)](std::span<const double> x) { return fn(x[0]); }, std::move(name), 1,
                         nullptr);
}

PointFunction PointFunction::constant(double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    return from_callable([value](std::span<const double>) { return value; }, os.str(), 1);
}

double PointFunction::operator()(std::span<const double> x) const {
    if (x.size() < dimension_)
        throw EvalError(name_, "point of dimension " + std::to_string(x.size()) + " passed to a function of dimension " +
                                   std::to_string(dimension_));
    return fn_(x);
}

std::optional<Rational> PointFunction::eval_exact(std::span<const Rational> x) const {
    if (!expr_) return std::nullopt;
    return expr_->eval_exact(x);
}

namespace {

PointFunction combine(const PointFunction& a, const PointFunction& b, const char* op,
                      double (*f)(double, double)) {
    return PointFunction::from_callable([a, b, f](std::span<const double> x) { return f(a(x), b(x)); },
                                        "(" + a.name() + " " + op + " " + b.name() + ")",
                                        std::max(a.dimension(), b.dimension()));
}

}  // namespace

PointFunction operator+(const PointFunction& a, const PointFunction& b) {
    return combine(a, b, "+", [](double u, double v) { return u + v; });
}

PointFunction operator-(const PointFunction& a, const PointFunction& b) {
    return combine(a, b, "-", [](double u, double v) { return u - v; });
}

PointFunction operator*(const PointFunction& a, const PointFunction& b) {
    return combine(a, b, "*", [](double u, double v) { return u * v; });
}

PointFunction scale(const PointFunction& a, double c) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << c << " * " << a.name() << ")";
    return PointFunction::from_callable([a, c](std::span<const double> x) { return c * a(x); }, os.str(),
                                        a.dimension());
}

PointFunction compose(const PointFunction& outer, const PointFunction& inner) {
    return PointFunction::from_callable_1d([outer, inner](double x) { return outer(inner(x)); },
                                           outer.name() + " o " + inner.name());
}

}  // namespace gauge
