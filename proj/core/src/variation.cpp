#include <cmath>
#include <limits>
#include <stdexcept>

#include "gauge/hk.hpp"

namespace gauge {

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

// Largest |psi(q, t)| over candidate tags t in q with diam(q) < delta(t).
template <class Tags>
double best_tag(const BoxTagFunction& psi, const Box& q, const Gauge& delta, const Tags& tags) {
    const double diam = q.diameter();
    double best = kInfeasible;
    for (const auto& t : tags) {
        if (!q.contains(t) || !(diam < delta(t))) continue;
        best = std::max(best, std::abs(psi(q, t)));
    }
    return best;
}

double dp(const BoxTagFunction& psi, const Box& q, const Gauge& delta, int remaining,
          std::map<Box, double>* table) {
    double value = best_tag(psi, q, delta, q.tag_candidates());
    if (remaining > 0) {
        double sum = 0.0;
        bool feasible = true;
        for (const auto& child : q.bisect()) {
            const double v = dp(psi, child, delta, remaining - 1, table);
            if (v == kInfeasible) feasible = false;
            else sum += v;
        }
        if (feasible) value = std::max(value, sum);
    }
    if (table) (*table)[q] = value;
    return value;
}

}  // namespace

std::optional<double> delta_variation_bruteforce(const BoxTagFunction& psi, const Box& box, const Gauge& delta,
                                                 std::span<const Rational> grid) {
    if (box.dim() != 1) throw std::invalid_argument("brute-force variation is one-dimensional");
    std::vector<Point> tags;
    for (const auto& g : grid) tags.push_back({g.to_double()});
    std::map<Box, double> cache;
    double best = kInfeasible;
    for_each_partition(box, grid, [&](const Partition& p) {
        double sum = 0.0;
        for (const auto& cell : p.cells) {
            auto it = cache.find(cell);
            if (it == cache.end()) it = cache.emplace(cell, best_tag(psi, cell, delta, tags)).first;
            if (it->second == kInfeasible) return;
            sum += it->second;
        }
        best = std::max(best, sum);
    });
    if (best == kInfeasible) return std::nullopt;
    return best;
}

std::optional<double> delta_variation_dp(const BoxTagFunction& psi, const Box& box, const Gauge& delta, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    const double v = dp(psi, box, delta, depth, nullptr);
    if (v == kInfeasible) return std::nullopt;
    return v;
}

std::map<Box, double> delta_variation_table(const BoxTagFunction& psi, const Box& box, const Gauge& delta,
                                            int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    std::map<Box, double> table;
    dp(psi, box, delta, depth, &table);
    return table;
}

}  // namespace gauge
