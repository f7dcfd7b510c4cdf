#pragma once

#include <cstddef>
#include <span>

namespace gauge {

/// Pairwise (tree) summation in index order. The result depends only on the
/// values and their order, never on scheduling.
inline double pairwise_sum(std::span<const double> v) {
    if (v.empty()) return 0.0;
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace gauge
