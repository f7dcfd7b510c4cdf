#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "gauge/hk.hpp"
#include "gauge/parallel.hpp"
#include "gauge/summation.hpp"

namespace gauge {

IntervalFunction indefinite_hk(const PointFunction& f, const IntervalFunction& g, const Box& box, int depth,
                               double tol, std::uint64_t budget) {
    if (depth < 0 || depth > 24) throw std::invalid_argument("indefinite depth must be in [0, 24]");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const std::size_t n = box.dim();
    const std::vector<DyadicCell> leaves = dyadic_cells(n, depth);
    const double share = std::ldexp(tol, -static_cast<int>(n) * depth);
    const std::uint64_t leaf_budget = std::max<std::uint64_t>(1000, budget / leaves.size());

    const std::vector<double> values = parallel_map<double>(leaves.size(), [&](std::size_t i) {
        const Box cell = leaves[i].to_box(box);
        const IntegralResult r = hk_integrate(f, g, cell, share, {leaf_budget, kDefaultDepthBudget});
        if (!r.converged)
            throw BudgetExceeded(fmt::format("indefinite integral on {} did not converge (error {:.3g}, {} evaluations)",
                                             cell.str(), r.error_estimate, r.evaluations));
        return r.value;
    });

    std::map<Box, double> entries;
    std::map<DyadicCell, double> level;
    for (std::size_t i = 0; i < leaves.size(); ++i) level.emplace(leaves[i], values[i]);
    for (int d = depth;; --d) {
        for (const auto& [cell, v] : level) entries.emplace(cell.to_box(box), v);
        if (d == 0) break;
        std::map<DyadicCell, std::vector<double>> parents;
        for (const auto& [cell, v] : level) {
            DyadicCell p{d - 1, cell.index};
            for (auto& x : p.index) x /= 2;
            parents[p].push_back(v);
        }
        level.clear();
        // Children arrive in lexicographic order, so sums are in corner order.
        for (const auto& [p, vs] : parents) level.emplace(p, pairwise_sum(vs));
    }
    return IntervalFunction::table(box, depth, std::move(entries), tol);
}

namespace {

int cell_depth(const Box& root, const Box& cell) {
    const double ratio = (root.side(0) / cell.side(0)).to_double();
    return static_cast<int>(std::lround(std::log2(ratio)));
}

}  // namespace

std::string indefinite_csv(const IntervalFunction& table) {
    if (!table.is_table() || !table.domain()) throw std::invalid_argument("indefinite_csv needs a table function");
    const Box& root = *table.domain();
    std::vector<std::pair<int, const std::pair<const Box, double>*>> rows;
    for (const auto& e : table.entries()) rows.emplace_back(cell_depth(root, e.first), &e);
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = "depth";
    for (std::size_t i = 1; i <= root.dim(); ++i) out += fmt::format(",lo{},hi{}", i, i);
    out += ",value\n";
    for (const auto& [d, e] : rows) {
        out += std::to_string(d);
        for (std::size_t i = 0; i < root.dim(); ++i)
            out += fmt::format(",{:.17g},{:.17g}", e->first.lo(i).to_double(), e->first.hi(i).to_double());
        out += fmt::format(",{:.17g}\n", e->second);
    }
    return out;
}

std::vector<std::pair<double, double>> primitive_nodes(const IntervalFunction& table, std::size_t base_node) {
    if (!table.is_table() || !table.domain() || table.dimension() != 1)
        throw std::invalid_argument("primitive_nodes needs a one-dimensional table function");
    const Box& root = *table.domain();
    const std::size_t cells = std::size_t{1} << table.depth();
    if (base_node > cells) throw std::out_of_range("base node beyond the grid");
    std::vector<double> nodes{root.lo(0).to_double()};
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 0; i < cells; ++i) {
        const Box cell = DyadicCell{table.depth(), {i}}.to_box(root);
        cumulative.push_back(cumulative.back() + table(cell));
        nodes.push_back(cell.hi(0).to_double());
    }
    const double base = cumulative[base_node];
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) out.emplace_back(nodes[i], cumulative[i] - base);
    return out;
}

}  // namespace gauge
