#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gauge/interval_function.hpp"
#include "gauge/intervals.hpp"
#include "gauge/point_function.hpp"

namespace gauge {

inline constexpr std::uint64_t kDefaultEvaluationBudget = 10'000'000;

/// Refinement indicator of one cell: |sum on the cell - sum over its children|.
struct CellError {
    Box cell;
    double cauchy_defect = 0.0;
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::uint64_t evaluations = 0;
    int max_depth = 0;
    bool converged = false;
    /// Cells with the largest remaining defects, worst first (at most eight).
    std::vector<CellError> worst_cells;

    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] static std::string csv_header();
    [[nodiscard]] std::string csv_row() const;
};

/// Sum of f(tag) * G(cell) over a tagged partition, pairwise-summed in cell
/// order. Evaluation errors are rethrown naming the offending tag.
double riemann_sum(const PointFunction& f, const IntervalFunction& g, const TaggedPartition& partition);

struct IntegrateOptions {
    std::uint64_t budget = kDefaultEvaluationBudget;
    int max_depth = kDefaultDepthBudget;
};

/// Adaptive gauge integral of f with respect to a corner-generated G over a box.
///
/// Each leaf of a dyadic cell tree carries a Riemann sum over a fixed tagged
/// sub-partition (Gauss-Legendre tags with cells sized by the weights, which
/// makes the sum exact for polynomials when G is the volume). The leaf's
/// Cauchy defect against its children drives refinement, worst first.
/// A corner whose defect does not shrink over several generations is handled
/// as a singular point: the cell touching it is tagged at the corner and the
/// surrounding shells are integrated separately, level by level, until the
/// shell increments die out.
///
/// Converged when the summed defects fall below tol/2 and two successive
/// global sums agree within tol/2. Throws std::invalid_argument for tol <= 0
/// or a table-kind G; evaluation errors propagate.
IntegralResult hk_integrate(const PointFunction& f, const IntervalFunction& g, const Box& box, double tol,
                            const IntegrateOptions& options = {});

/// Table of integrals over every dyadic subcell of `box` down to `depth`.
/// Leaves are integrated with a volume-proportional share of `tol`; parents
/// are sums of their children. Throws BudgetExceeded if a leaf fails to converge.
IntervalFunction indefinite_hk(const PointFunction& f, const IntervalFunction& g, const Box& box, int depth,
                               double tol, std::uint64_t budget = kDefaultEvaluationBudget);

/// CSV with columns depth, lo/hi per axis, value.
std::string indefinite_csv(const IntervalFunction& table);

/// Point values of the primitive of a one-dimensional indefinite table on its
/// finest dyadic grid, normalised to vanish at grid node `base_node`.
std::vector<std::pair<double, double>> primitive_nodes(const IntervalFunction& table, std::size_t base_node);

/// Psi(Q, x): a function of a box and a tag.
using BoxTagFunction = std::function<double(const Box&, std::span<const double>)>;

/// Exact supremum of sum |Psi(Q, x)| over delta-fine tagged partitions whose
/// breakpoints and tags are drawn from `grid` (1-D). nullopt when no
/// configuration is delta-fine.
std::optional<double> delta_variation_bruteforce(const BoxTagFunction& psi, const Box& box, const Gauge& delta,
                                                 std::span<const Rational> grid);

/// Same supremum over dyadic partitions down to `depth` with center and corner
/// tags, by dynamic programming; works in any dimension.
std::optional<double> delta_variation_dp(const BoxTagFunction& psi, const Box& box, const Gauge& delta, int depth);

/// Every dyadic cell's DP value; -infinity marks cells with no delta-fine configuration.
std::map<Box, double> delta_variation_table(const BoxTagFunction& psi, const Box& box, const Gauge& delta, int depth);

}  // namespace gauge
