#include "gauge/interval_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gauge/summation.hpp"

namespace gauge {

IntervalFunction IntervalFunction::corner(PointFunction generator, std::size_t dimension, std::optional<Box> domain) {
    if (dimension == 0) throw std::invalid_argument("interval function dimension must be >= 1");
    if (domain && domain->dim() != dimension) throw std::invalid_argument("domain dimension mismatch");
    IntervalFunction f;
    f.generator_ = std::move(generator);
    f.dimension_ = dimension;
    f.domain_ = std::move(domain);
    return f;
}

IntervalFunction IntervalFunction::volume(std::size_t dimension) {
    std::string text = "x";
    for (std::size_t i = 2; i <= dimension; ++i) text += "*x" + std::to_string(i);
    IntervalFunction f = corner(PointFunction::from_expr(Expr::parse(text)), dimension);
    f.is_volume_ = true;
    return f;
}

IntervalFunction IntervalFunction::table(Box root, int depth, std::map<Box, double> entries, double tolerance) {
    IntervalFunction f;
    f.dimension_ = root.dim();
    f.domain_ = std::move(root);
    f.depth_ = depth;
    f.tolerance_ = tolerance;
    f.table_ = std::make_shared<const std::map<Box, double>>(std::move(entries));
    return f;
}

const std::map<Box, double>& IntervalFunction::entries() const {
    static const std::map<Box, double> empty;
    return table_ ? *table_ : empty;
}

std::string IntervalFunction::name() const {
    if (generator_) return "increment of " + generator_->name();
    return "table on " + domain_->str() + " to depth " + std::to_string(depth_);
}

double IntervalFunction::operator()(const Box& q) const {
    if (q.dim() != dimension_) throw std::invalid_argument("box dimension differs from interval function dimension");
    if (domain_ && !domain_->contains(q))
        throw std::out_of_range("box " + q.str() + " outside interval function domain " + domain_->str());
    if (table_) {
        auto it = table_->find(q);
        if (it == table_->end()) throw std::out_of_range("no table entry for box " + q.str());
        return it->second;
    }
    if (is_volume_) return q.volume();
    double sum = 0.0;
    const std::size_t n = q.dim();
    for (std::size_t k = 0; k < q.corner_count(); ++k) {
        const Point c = q.corner(k);
        const int lows = static_cast<int>(n) - __builtin_popcountll(k);
        const double v = (*generator_)(c);
        sum += (lows % 2 == 0) ? v : -v;
    }
    return sum;
}

double IntervalFunction::increment(std::span<const double> lo, std::span<const double> hi) const {
    if (!generator_) throw std::logic_error("increment on double boxes needs a corner-generated function");
    const std::size_t n = dimension_;
    if (is_volume_) {
        double v = 1.0;
        for (std::size_t i = 0; i < n; ++i) v *= hi[i] - lo[i];
        return v;
    }
    double sum = 0.0;
    std::vector<double> c(n);
    for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
        int lows = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool upper = (k >> (n - 1 - i)) & 1U;
            c[i] = upper ? hi[i] : lo[i];
            lows += upper ? 0 : 1;
        }
        const double v = (*generator_)(c);
        sum += (lows % 2 == 0) ? v : -v;
    }
    return sum;
}

std::optional<Rational> IntervalFunction::exact(const Box& q) const {
    if (!generator_) return std::nullopt;
    const std::size_t n = q.dim();
    Rational sum(0);
    for (std::size_t k = 0; k < q.corner_count(); ++k) {
        auto v = generator_->eval_exact(q.exact_corner(k));
        if (!v) return std::nullopt;
        const int lows = static_cast<int>(n) - __builtin_popcountll(k);
        if (lows % 2 == 0) sum += *v; else sum -= *v;
    }
    return sum;
}

double IntervalFunction::table_additivity_defect() const {
    double worst = 0.0;
    if (!table_) return worst;
    for (const auto& [box, value] : *table_) {
        double children = 0.0;
        bool complete = true;
        for (const auto& child : box.bisect()) {
            auto it = table_->find(child);
            if (it == table_->end()) { complete = false; break; }
            children += it->second;
        }
        if (complete) worst = std::max(worst, std::abs(children - value));
    }
    return worst;
}

// ---------------------------------------------------------------------------

SuperadditiveFn SuperadditiveFn::volume_power(double p) {
    std::ostringstream os;
    os << "|Q|^" << p;
    return SuperadditiveFn([p](const Box& q) { return p == 1.0 ? q.volume() : std::pow(q.volume(), p); }, os.str());
}

SuperadditiveFn SuperadditiveFn::from_side_expr(const Expr& e) {
    return SuperadditiveFn(
        [e](const Box& q) {
            std::vector<double> sides;
            for (std::size_t i = 0; i < q.dim(); ++i) sides.push_back(q.side(i).to_double());
            return e.eval(sides);
        },
        "sides -> " + e.str());
}

SuperadditiveFn SuperadditiveFn::table(std::map<Box, double> entries, std::string name) {
    auto shared = std::make_shared<const std::map<Box, double>>(std::move(entries));
    return SuperadditiveFn(
        [shared](const Box& q) {
            auto it = shared->find(q);
            if (it == shared->end()) throw std::out_of_range("no control table entry for box " + q.str());
            return it->second;
        },
        std::move(name), shared);
}

SuperadditiveFn SuperadditiveFn::from_function(std::function<double(const Box&)> fn, std::string name) {
    return SuperadditiveFn(std::move(fn), std::move(name));
}

double SuperadditiveFn::operator()(const Box& q) const {
    const double v = fn_(q);
    if (!(v > 0.0)) {
        std::ostringstream os;
        os << "control '" << name_ << "' is not strictly positive on " << q.str() << ": " << v;
        throw std::domain_error(os.str());
    }
    return v;
}

namespace {

void require_partition(const Box& parent, std::span<const Box> cells) {
    auto check = is_partition(parent, cells);
    if (!check.ok) throw std::invalid_argument("partition_defect: not a partition of " + parent.str() + ": " + check.defect);
}

template <class H>
double defect_impl(const H& h, const Box& parent, std::span<const Box> cells) {
    require_partition(parent, cells);
    std::vector<double> values;
    values.reserve(cells.size());
    for (const auto& c : cells) values.push_back(h(c));
    return pairwise_sum(values) - h(parent);
}

}  // namespace

double partition_defect(const IntervalFunction& h, const Box& parent, std::span<const Box> cells) {
    return defect_impl(h, parent, cells);
}

double partition_defect(const SuperadditiveFn& h, const Box& parent, std::span<const Box> cells) {
    return defect_impl(h, parent, cells);
}

std::optional<Rational> partition_defect_exact(const IntervalFunction& h, const Box& parent,
                                               std::span<const Box> cells) {
    require_partition(parent, cells);
    auto total = h.exact(parent);
    if (!total) return std::nullopt;
    Rational sum(0);
    for (const auto& c : cells) {
        auto v = h.exact(c);
        if (!v) return std::nullopt;
        sum += *v;
    }
    return sum - *total;
}

std::optional<Box> find_negative_cell(const IntervalFunction& g, const Box& root, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    for (int d = 0; d <= depth; ++d)
        for (const auto& cell : dyadic_cells(root.dim(), d)) {
            Box q = cell.to_box(root);
            if (g(q) < 0.0) return q;
        }
    return std::nullopt;
}

}  // namespace gauge
