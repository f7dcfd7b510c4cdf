#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "gauge/intervals.hpp"
#include "gauge/point_function.hpp"

namespace gauge {

/// Box -> real map. Corner-generated functions are additive by
/// construction: G(Q) is the alternating sum over the 2^n corners of Q of
/// (-1)^(number of lo coordinates) * g(corner), i.e. g(b) - g(a) in 1-D.
/// Table functions hold explicit values on the dyadic tree of a root box.
class IntervalFunction {
public:
    static IntervalFunction corner(PointFunction generator, std::size_t dimension,
                                   std::optional<Box> domain = std::nullopt);
    /// Lebesgue measure |Q|, generated by x1*x2*...*xn.
    static IntervalFunction volume(std::size_t dimension);
    static IntervalFunction table(Box root, int depth, std::map<Box, double> entries, double tolerance);

    /// Throws std::out_of_range for a box outside the domain or a missing entry.
    double operator()(const Box& q) const;
    /// Corner-generated only: the increment over a box with double endpoints.
    [[nodiscard]] double increment(std::span<const double> lo, std::span<const double> hi) const;
    /// Exact increment when the generator evaluates exactly (rational polynomial).
    [[nodiscard]] std::optional<Rational> exact(const Box& q) const;

    [[nodiscard]] bool is_corner() const { return generator_.has_value(); }
    [[nodiscard]] bool is_table() const { return !generator_.has_value(); }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] const PointFunction* generator() const { return generator_ ? &*generator_ : nullptr; }
    [[nodiscard]] const std::optional<Box>& domain() const { return domain_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] double tolerance() const { return tolerance_; }
    [[nodiscard]] const std::map<Box, double>& entries() const;
    [[nodiscard]] std::string name() const;

    /// Largest |sum of children - parent| over the table's own tree.
    [[nodiscard]] double table_additivity_defect() const;

private:
    IntervalFunction() = default;
    std::optional<PointFunction> generator_;
    std::size_t dimension_ = 1;
    std::optional<Box> domain_;
    int depth_ = 0;
    double tolerance_ = 0.0;
    // Volume increments are products of side lengths, avoiding corner cancellation.
    bool is_volume_ = false;
    std::shared_ptr<const std::map<Box, double>> table_;
};

/// Strictly positive box function used as a control; superadditivity is a
/// property to be checked, not enforced.
class SuperadditiveFn {
public:
    /// |Q|^p.
    static SuperadditiveFn volume_power(double p);
    /// Expression in the side lengths x1..xn of the box.
    static SuperadditiveFn from_side_expr(const Expr& e);
    static SuperadditiveFn table(std::map<Box, double> entries, std::string name);
    static SuperadditiveFn from_function(std::function<double(const Box&)> fn, std::string name);

    /// Throws std::domain_error when the value is not strictly positive.
    double operator()(const Box& q) const;
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::map<Box, double>* entries() const { return table_.get(); }

private:
    SuperadditiveFn(std::function<double(const Box&)> fn, std::string name,
                    std::shared_ptr<const std::map<Box, double>> table = nullptr)
        : fn_(std::move(fn)), name_(std::move(name)), table_(std::move(table)) {}
    std::function<double(const Box&)> fn_;
    std::string name_;
    std::shared_ptr<const std::map<Box, double>> table_;
};

/// Sum over the cells minus the value on the parent: 0 for additive, <= 0 for
/// superadditive functions. Throws std::invalid_argument if `cells` do not
/// partition `parent`.
double partition_defect(const IntervalFunction& h, const Box& parent, std::span<const Box> cells);
double partition_defect(const SuperadditiveFn& h, const Box& parent, std::span<const Box> cells);
/// Exact defect for corner-generated functions with a rational-polynomial generator.
std::optional<Rational> partition_defect_exact(const IntervalFunction& h, const Box& parent,
                                               std::span<const Box> cells);

/// First dyadic cell of `root` down to `depth` (coarse to fine, lexicographic)
/// with G(Q) < 0, or nullopt when G is nonnegative on all of them.
std::optional<Box> find_negative_cell(const IntervalFunction& g, const Box& root, int depth);

}  // namespace gauge
