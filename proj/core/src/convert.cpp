#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "gauge/mc.hpp"
#include "gauge/parallel.hpp"

namespace gauge {

namespace {

// Dyadic cells of `domain` at `depth` whose closure contains x.
std::vector<Box> cells_containing(const Box& domain, const Point& x, int depth) {
    const std::size_t n = domain.dim();
    const Rational scale = Rational::pow2(depth);
    std::vector<std::vector<std::uint64_t>> per_axis(n);
    const std::uint64_t count = std::uint64_t{1} << depth;
    for (std::size_t i = 0; i < n; ++i) {
        const Rational t = (Rational::from_double(x[i]) - domain.lo(i)) / domain.side(i) * scale;
        const double td = t.to_double();
        if (td < 0.0 || td > static_cast<double>(count)) return {};
        const auto fl = static_cast<std::uint64_t>(std::floor(td));
        if (t.is_integer()) {
            if (fl > 0) per_axis[i].push_back(fl - 1);
            if (fl < count) per_axis[i].push_back(fl);
        } else {
            per_axis[i].push_back(fl);
        }
    }
    std::vector<Box> out;
    std::vector<std::size_t> pos(n, 0);
    while (true) {
        DyadicCell c{depth, std::vector<std::uint64_t>(n)};
        for (std::size_t i = 0; i < n; ++i) c.index[i] = per_axis[i][pos[i]];
        out.push_back(c.to_box(domain));
        std::size_t i = n;
        while (i-- > 0) {
            if (++pos[i] < per_axis[i].size()) break;
            pos[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    return out;
}

// Half-side translates of `cell` clipped to the domain that still contain x.
std::vector<Box> translates(const Box& domain, const Box& cell, const Point& x) {
    const std::size_t n = domain.dim();
    std::vector<Box> out;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    const Rational half(1, 2);
    for (std::size_t s = 0; s < combos; ++s) {
        std::size_t r = s;
        bool zero = true;
        std::vector<Rational> lo, hi;
        for (std::size_t i = 0; i < n; ++i) {
            const int shift = static_cast<int>(r % 3) - 1;
            r /= 3;
            zero = zero && shift == 0;
            const Rational d = cell.side(i) * half * Rational(shift);
            lo.push_back(cell.lo(i) + d);
            hi.push_back(cell.hi(i) + d);
        }
        if (zero) continue;
        auto clipped = Box(std::move(lo), std::move(hi)).intersect(domain);
        if (clipped && clipped->contains(x)) out.push_back(*clipped);
    }
    return out;
}

bool inequality_holds(const IntervalFunction& F, double fx, const IntervalFunction& G, const SuperadditiveFn& Phi,
                      double eps, const Box& q) {
    return std::abs(F(q) - fx * G(q)) < eps * Phi(q);
}

}  // namespace

double gauge_scale_at(const IntervalFunction& F, const PointFunction& f, const IntervalFunction& G,
                      const SuperadditiveFn& Phi, double eps, const Box& domain, const Point& x, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    const bool with_translates = F.is_corner() && G.is_corner() && Phi.entries() == nullptr;
    const double fx = f(x);
    int good = depth + 1;
    for (int j = depth; j >= 0; --j) {
        std::set<Box> boxes;
        for (const auto& c : cells_containing(domain, x, j)) {
            boxes.insert(c);
            if (with_translates)
                for (auto& t : translates(domain, c, x)) boxes.insert(std::move(t));
        }
        const bool ok = std::all_of(boxes.begin(), boxes.end(),
                                    [&](const Box& q) { return inequality_holds(F, fx, G, Phi, eps, q); });
        if (!ok) break;
        good = j;
    }
    if (good > depth) {
        std::string p;
        for (double v : x) p += fmt::format("{}{:.17g}", p.empty() ? "" : ", ", v);
        throw std::runtime_error(fmt::format("no gauge at ({}): the inequality fails at depth {}", p, depth));
    }
    return domain.diameter() * std::ldexp(1.0, -good);
}

Gauge gauge_from_control(const IntervalFunction& F, const PointFunction& f, const IntervalFunction& G,
                         const SuperadditiveFn& Phi, double eps, const Box& domain, int depth, int resolution) {
    if (resolution < 0 || resolution > depth) throw std::invalid_argument("resolution must lie in [0, depth]");
    const auto cells = dyadic_cells(domain.dim(), resolution);
    const auto scales = parallel_map<double>(cells.size(), [&](std::size_t i) {
        const Box box = cells[i].to_box(domain);
        double s = gauge_scale_at(F, f, G, Phi, eps, domain, box.center(), depth);
        for (const auto& t : box.tag_candidates()) s = std::min(s, gauge_scale_at(F, f, G, Phi, eps, domain, t, depth));
        return s;
    });
    std::map<std::vector<std::uint64_t>, double> values;
    for (std::size_t i = 0; i < cells.size(); ++i) values.emplace(cells[i].index, scales[i]);
    return Gauge::piecewise_dyadic(domain, resolution, std::move(values), domain.diameter() * std::ldexp(1.0, -depth));
}

std::optional<Gauge> find_certified_gauge(const BoxTagFunction& psi, const Box& domain, int k, int depth) {
    const double bound = std::ldexp(1.0, -k);
    for (int j = 0; j <= depth; ++j) {
        Gauge delta = Gauge::constant(1.5 * std::ldexp(domain.diameter(), -j));
        const auto v = delta_variation_dp(psi, domain, delta, depth);
        if (v && *v <= bound) return delta;
    }
    return std::nullopt;
}

SuperadditiveFn control_from_gauges(const BoxTagFunction& psi, const std::vector<Gauge>& gauges, const Box& domain,
                                    int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    const auto tables = parallel_map<std::map<Box, double>>(
        gauges.size(), [&](std::size_t i) { return delta_variation_table(psi, domain, gauges[i], depth); });
    for (std::size_t k = 1; k <= tables.size(); ++k) {
        const double root = tables[k - 1].at(domain);
        if (!(root <= std::ldexp(1.0, -static_cast<int>(k))))
            throw std::invalid_argument(
                fmt::format("gauge {} is not certified: variation {:.6g} exceeds 2^-{}", k, root, k));
    }
    std::map<Box, double> phi;
    for (int d = 0; d <= depth; ++d) {
        for (const auto& cell : dyadic_cells(domain.dim(), d)) {
            const Box box = cell.to_box(domain);
            double value = box.volume();
            for (std::size_t k = 1; k <= tables.size(); ++k) {
                const double v = tables[k - 1].at(box);
                if (v == -std::numeric_limits<double>::infinity())
                    throw std::invalid_argument(
                        fmt::format("no delta_{}-fine partition of {} down to depth {}", k, box.str(), depth));
                value += static_cast<double>(k) * v;
            }
            phi.emplace(box, value);
        }
    }
    return SuperadditiveFn::table(std::move(phi), fmt::format("|Q| + sum of {} weighted variations", tables.size()));
}

McNdVerdict verify_mc_nd(const IntervalFunction& F, const PointFunction& f, const IntervalFunction& G,
                         const SuperadditiveFn& Phi, const Box& domain, const std::vector<Point>& sample_points,
                         int min_depth, int max_depth, double tol) {
    if (min_depth < 0 || max_depth < min_depth) throw std::invalid_argument("bad depth range");
    McNdVerdict v;
    v.points = parallel_map<McNdRecord>(sample_points.size(), [&](std::size_t i) {
        McNdRecord rec;
        rec.x = sample_points[i];
        const double fx = f(rec.x);
        for (int d = min_depth; d <= max_depth; ++d) {
            double q = 0.0;
            for (const auto& box : cells_containing(domain, rec.x, d))
                q = std::max(q, std::abs(F(box) - fx * G(box)) / Phi(box));
            rec.q.push_back(q);
        }
        // Sup over every tested cell of depth >= d, as verify_mc takes every probe within h.
        for (std::size_t j = rec.q.size() - 1; j-- > 0;) rec.q[j] = std::max(rec.q[j], rec.q[j + 1]);
        const auto& q = rec.q;
        rec.pass = q.back() <= tol;
        for (std::size_t j = q.size() >= 3 ? q.size() - 2 : 1; j < q.size(); ++j)
            if (q[j] > 2.0 * q[j - 1]) rec.pass = false;
        return rec;
    });
    v.pass = std::all_of(v.points.begin(), v.points.end(), [](const auto& p) { return p.pass; });
    return v;
}

double superadditivity_defect(const SuperadditiveFn& Phi) {
    const auto* entries = Phi.entries();
    if (!entries) throw std::invalid_argument("superadditivity_defect needs a table-backed control");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [box, value] : *entries) {
        double sum = 0.0;
        bool complete = true;
        for (const auto& child : box.bisect()) {
            auto it = entries->find(child);
            if (it == entries->end()) {
                complete = false;
                break;
            }
            sum += it->second;
        }
        if (complete) worst = std::max(worst, sum - value);
    }
    return worst == -std::numeric_limits<double>::infinity() ? 0.0 : worst;
}

}  // namespace gauge
