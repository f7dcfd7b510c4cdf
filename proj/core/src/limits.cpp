#include "gauge/limits.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace gauge {

LimitResult one_sided_limit(const std::function<double(double)>& fn, double x, Side side,
                            const LimitOptions& options) {
    if (options.terms < 6) throw std::invalid_argument("one_sided_limit needs at least 6 terms");
    if (!(options.h0 > 0.0)) throw std::invalid_argument("one_sided_limit needs a positive first offset");
    const double sign = side == Side::Left ? -1.0 : 1.0;
    std::vector<double> a;
    for (int k = 0; k < options.terms; ++k) {
        const double v = fn(x + sign * std::ldexp(options.h0, -k));
        if (!std::isfinite(v)) throw LimitDivergence(fmt::format("non-finite sample near {:.17g}", x));
        a.push_back(v);
    }
    const std::size_t k = a.size() - 1;
    const double scale = 1.0 + std::abs(a[k]);
    auto d = [&](std::size_t i) { return a[i] - a[i - 1]; };
    const double recent = std::abs(d(k)) + std::abs(d(k - 1)) + std::abs(d(k - 2));
    if (recent <= 1e-14 * scale) return {a[k], recent};
    const double earlier = std::abs(d(k - 3)) + std::abs(d(k - 4)) + std::abs(d(k - 5));
    if (recent > 0.5 * earlier)
        throw LimitDivergence(fmt::format("samples near {:.17g} from the {} do not settle", x,
                                          side == Side::Left ? "left" : "right"));
    const double r1 = d(k) / d(k - 1);
    const double r0 = d(k - 1) / d(k - 2);
    if (std::isfinite(r1) && std::isfinite(r0) && r1 > 0.0 && r1 < 0.95 && std::abs(r1 - r0) < 0.1) {
        const double tail = d(k) * r1 / (1.0 - r1);
        return {a[k] + tail, std::abs(tail) * std::abs(r1 - r0) + 1e-15 * scale};
    }
    return {a[k], 4.0 * std::abs(d(k))};
}

}  // namespace gauge
