#pragma once

#include <functional>
#include <stdexcept>

namespace gauge {

enum class Side { Left, Right };

/// The sampled sequence does not settle.
class LimitDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LimitOptions {
    /// First offset; samples are taken at x -/+ h0 * 2^-k for k < terms.
    double h0 = 1e-3;
    int terms = 12;
};

struct LimitResult {
    double value = 0.0;
    double error = 0.0;
};

/// Limit of fn(y) as y -> x from one side. Differences of the geometric
/// samples must decay; when successive ratios agree the tail is summed as a
/// geometric series (exact for errors of the form C h^p).
LimitResult one_sided_limit(const std::function<double(double)>& fn, double x, Side side,
                            const LimitOptions& options = {});

}  // namespace gauge
