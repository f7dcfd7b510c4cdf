#include "gauge/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

namespace gauge {

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<Rational> lo, std::vector<Rational> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size())
        throw std::invalid_argument("box needs matching, nonempty endpoint lists");
    for (std::size_t i = 0; i < lo_.size(); ++i)
        if (!(lo_[i] < hi_[i]))
            throw std::invalid_argument("degenerate box: axis " + std::to_string(i) + " has lo >= hi");
}

Box Box::interval(const Rational& lo, const Rational& hi) { return Box({lo}, {hi}); }

Box Box::cube(std::size_t dim, const Rational& lo, const Rational& hi) {
    return Box(std::vector<Rational>(dim, lo), std::vector<Rational>(dim, hi));
}

Box Box::parse(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    std::vector<Rational> lo, hi;
    if (s.rfind("[[", 0) == 0) {
        auto j = nlohmann::json::parse(s);
        for (const auto& axis : j) {
            if (!axis.is_array() || axis.size() != 2) throw std::invalid_argument("box axis must be [lo, hi]");
            auto as_text = [](const nlohmann::json& v) {
                return v.is_string() ? v.get<std::string>() : v.dump();
            };
            lo.push_back(Rational::parse(as_text(axis[0])));
            hi.push_back(Rational::parse(as_text(axis[1])));
        }
        return Box(std::move(lo), std::move(hi));
    }
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (s[pos] != '[') throw std::invalid_argument("malformed box '" + std::string(text) + "'");
        auto close = s.find(']', pos);
        auto comma = s.find(',', pos);
        if (close == std::string::npos || comma == std::string::npos || comma > close)
            throw std::invalid_argument("malformed box '" + std::string(text) + "'");
        lo.push_back(Rational::parse(s.substr(pos + 1, comma - pos - 1)));
        hi.push_back(Rational::parse(s.substr(comma + 1, close - comma - 1)));
        pos = close + 1;
        if (pos < s.size()) {
            if (s[pos] != 'x' && s[pos] != '*') throw std::invalid_argument("malformed box '" + std::string(text) + "'");
            ++pos;
        }
    }
    return Box(std::move(lo), std::move(hi));
}

double Box::diameter() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double s = side(i).to_double();
        sum += s * s;
    }
    return std::sqrt(sum);
}

double Box::volume() const { return exact_volume().to_double(); }

Rational Box::exact_volume() const {
    Rational v(1);
    for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
    return v;
}

std::vector<Rational> Box::exact_center() const {
    std::vector<Rational> c;
    c.reserve(dim());
    for (std::size_t i = 0; i < dim(); ++i) c.push_back(midpoint(lo_[i], hi_[i]));
    return c;
}

Point Box::center() const {
    Point c;
    c.reserve(dim());
    for (const auto& r : exact_center()) c.push_back(r.to_double());
    return c;
}

std::vector<Rational> Box::exact_corner(std::size_t k) const {
    std::vector<Rational> c;
    c.reserve(dim());
    for (std::size_t i = 0; i < dim(); ++i) c.push_back(((k >> (dim() - 1 - i)) & 1U) ? hi_[i] : lo_[i]);
    return c;
}

Point Box::corner(std::size_t k) const {
    Point c;
    c.reserve(dim());
    for (const auto& r : exact_corner(k)) c.push_back(r.to_double());
    return c;
}

std::vector<Point> Box::tag_candidates() const {
    std::vector<Point> out;
    out.reserve(corner_count() + 1);
    out.push_back(center());
    for (std::size_t k = 0; k < corner_count(); ++k) out.push_back(corner(k));
    return out;
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!std::isfinite(x[i])) return false;
        if (cmp(lo_[i].raw(), x[i]) > 0 || cmp(hi_[i].raw(), x[i]) < 0) return false;
    }
    return true;
}

bool Box::contains(std::span<const Rational> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (x[i] < lo_[i] || hi_[i] < x[i]) return false;
    return true;
}

bool Box::contains(const Box& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (other.lo_[i] < lo_[i] || hi_[i] < other.hi_[i]) return false;
    return true;
}

std::optional<Box> Box::intersect(const Box& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("intersecting boxes of different dimension");
    std::vector<Rational> lo, hi;
    for (std::size_t i = 0; i < dim(); ++i) {
        lo.push_back(std::max(lo_[i], other.lo_[i]));
        hi.push_back(std::min(hi_[i], other.hi_[i]));
        if (!(lo.back() < hi.back())) return std::nullopt;
    }
    return Box(std::move(lo), std::move(hi));
}

std::vector<Box> Box::bisect() const {
    const auto mid = exact_center();
    std::vector<Box> children;
    children.reserve(corner_count());
    for (std::size_t k = 0; k < corner_count(); ++k) {
        std::vector<Rational> lo, hi;
        for (std::size_t i = 0; i < dim(); ++i) {
            const bool upper = (k >> (dim() - 1 - i)) & 1U;
            lo.push_back(upper ? mid[i] : lo_[i]);
            hi.push_back(upper ? hi_[i] : mid[i]);
        }
        children.emplace_back(std::move(lo), std::move(hi));
    }
    return children;
}

std::string Box::str() const {
    std::string out;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (i) out += "x";
        out += "[" + lo_[i].str() + "," + hi_[i].str() + "]";
    }
    return out;
}

std::string Box::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < dim(); ++i) j.push_back({lo_[i].str(), hi_[i].str()});
    return j.dump();
}

std::strong_ordering operator<=>(const Box& a, const Box& b) {
    if (auto c = a.dim() <=> b.dim(); c != 0) return c;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (auto c = a.lo_[i] <=> b.lo_[i]; c != 0) return c;
        if (auto c = a.hi_[i] <=> b.hi_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Partitions

Partition TaggedPartition::untagged() const {
    Partition p{parent, {}};
    p.cells.reserve(cells.size());
    for (const auto& c : cells) p.cells.push_back(c.cell);
    return p;
}

std::string TaggedPartition::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : cells)
        j.push_back({{"cell", nlohmann::json::parse(c.cell.to_json())}, {"tag", c.tag}});
    return j.dump();
}

PartitionCheck is_partition(const Box& parent, std::span<const Box> cells) {
    const std::size_t n = parent.dim();
    for (const auto& c : cells)
        if (c.dim() != n) throw std::invalid_argument("partition cell dimension differs from parent");

    PartitionCheck result;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (parent.contains(cells[k])) continue;
        std::vector<Rational> w = cells[k].exact_center();
        for (std::size_t i = 0; i < n; ++i) {
            if (cells[k].lo(i) < parent.lo(i)) { w[i] = midpoint(cells[k].lo(i), std::min(cells[k].hi(i), parent.lo(i))); break; }
            if (parent.hi(i) < cells[k].hi(i)) { w[i] = midpoint(std::max(cells[k].lo(i), parent.hi(i)), cells[k].hi(i)); break; }
        }
        result.defect = "cell " + std::to_string(k) + " " + cells[k].str() + " extends outside parent";
        result.witness = std::move(w);
        return result;
    }

    // Coordinate compression: the endpoints of all boxes cut the parent into
    // elementary cells; each must be covered exactly once.
    std::vector<std::vector<Rational>> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = {parent.lo(i), parent.hi(i)};
        for (const auto& c : cells) {
            grid[i].push_back(c.lo(i));
            grid[i].push_back(c.hi(i));
        }
        std::sort(grid[i].begin(), grid[i].end());
        grid[i].erase(std::unique(grid[i].begin(), grid[i].end()), grid[i].end());
    }
    std::size_t total = 1;
    std::vector<std::size_t> extent(n), stride(n);
    for (std::size_t i = n; i-- > 0;) {
        extent[i] = grid[i].size() - 1;
        stride[i] = total;
        if (total > std::numeric_limits<std::size_t>::max() / extent[i])
            throw std::length_error("partition check grid too large");
        total *= extent[i];
    }
    if (total > (std::size_t{1} << 28)) throw std::length_error("partition check grid too large");
    std::vector<std::uint8_t> count(total, 0);

    for (const auto& c : cells) {
        std::vector<std::size_t> first(n), last(n);
        for (std::size_t i = 0; i < n; ++i) {
            first[i] = static_cast<std::size_t>(std::lower_bound(grid[i].begin(), grid[i].end(), c.lo(i)) - grid[i].begin());
            last[i] = static_cast<std::size_t>(std::lower_bound(grid[i].begin(), grid[i].end(), c.hi(i)) - grid[i].begin());
        }
        std::vector<std::size_t> idx = first;
        while (true) {
            std::size_t flat = 0;
            for (std::size_t i = 0; i < n; ++i) flat += idx[i] * stride[i];
            if (count[flat] < 255) ++count[flat];
            std::size_t axis = n;
            while (axis-- > 0) {
                if (++idx[axis] < last[axis]) break;
                idx[axis] = first[axis];
            }
            if (axis == static_cast<std::size_t>(-1)) break;
        }
    }

    for (std::size_t flat = 0; flat < total; ++flat) {
        if (count[flat] == 1) continue;
        std::vector<Rational> w(n);
        std::size_t rem = flat;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = rem / stride[i];
            rem %= stride[i];
            w[i] = midpoint(grid[i][j], grid[i][j + 1]);
        }
        std::string where = "(";
        for (std::size_t i = 0; i < n; ++i) where += (i ? "," : "") + w[i].str();
        where += ")";
        result.defect = (count[flat] == 0 ? "gap at " : "overlap at ") + where;
        result.witness = std::move(w);
        return result;
    }
    result.ok = true;
    return result;
}

// ---------------------------------------------------------------------------
// Gauge

Gauge Gauge::constant(double value) {
    std::ostringstream os;
    os << "constant " << value;
    return Gauge([value](std::span<const double>) { return value; }, os.str());
}

Gauge Gauge::from_function(Function fn, std::string description) {
    return Gauge(std::move(fn), std::move(description));
}

Gauge Gauge::piecewise_dyadic(Box root, int depth, std::map<std::vector<std::uint64_t>, double> values,
                              double floor) {
    if (!(floor > 0.0)) throw std::invalid_argument("gauge floor must be strictly positive");
    auto table = std::make_shared<const std::map<std::vector<std::uint64_t>, double>>(std::move(values));
    const std::size_t n = root.dim();
    std::vector<double> lo(n), width(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = root.lo(i).to_double();
        width[i] = root.side(i).to_double();
    }
    const double cells_per_axis = std::ldexp(1.0, depth);
    auto fn = [table, lo, width, cells_per_axis, floor, n](std::span<const double> x) {
        // Candidate indices per axis: the cell containing x and, on a face, its neighbour.
        std::vector<std::vector<std::uint64_t>> cand(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (x[i] - lo[i]) / width[i] * cells_per_axis;
            const double f = std::floor(t);
            const auto top = static_cast<std::uint64_t>(cells_per_axis) - 1;
            auto clamp = [top](double v) {
                return v <= 0.0 ? std::uint64_t{0} : std::min(top, static_cast<std::uint64_t>(v));
            };
            cand[i].push_back(clamp(f));
            if (t == f && f > 0.0 && f <= static_cast<double>(top)) cand[i].push_back(clamp(f - 1.0));
        }
        double best = std::numeric_limits<double>::infinity();
        bool found = false;
        std::vector<std::size_t> pick(n, 0);
        while (true) {
            std::vector<std::uint64_t> key(n);
            for (std::size_t i = 0; i < n; ++i) key[i] = cand[i][pick[i]];
            if (auto it = table->find(key); it != table->end()) {
                best = std::min(best, it->second);
                found = true;
            }
            std::size_t axis = n;
            while (axis-- > 0) {
                if (++pick[axis] < cand[axis].size()) break;
                pick[axis] = 0;
            }
            if (axis == static_cast<std::size_t>(-1)) break;
        }
        return found ? std::max(best, floor) : floor;
    };
    return Gauge(std::move(fn), "piecewise dyadic gauge on " + root.str() + " at depth " + std::to_string(depth));
}

double Gauge::operator()(std::span<const double> x) const {
    const double v = fn_(x);
    if (!(v > 0.0)) {
        std::ostringstream os;
        os << "gauge '" << description_ << "' is not strictly positive at (";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
        os << "): " << v;
        throw std::domain_error(os.str());
    }
    return v;
}

bool is_delta_fine(const TaggedPartition& partition, const Gauge& gauge, std::size_t* first_violation) {
    for (std::size_t k = 0; k < partition.cells.size(); ++k) {
        const auto& tc = partition.cells[k];
        if (!tc.cell.contains(tc.tag) || !(tc.cell.diameter() < gauge(tc.tag))) {
            if (first_violation) *first_violation = k;
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Cousin construction

namespace {

void cousin_recurse(const Box& cell, const Gauge& gauge, int depth, int budget, std::vector<TaggedCell>& out) {
    const double diam = cell.diameter();
    for (auto& tag : cell.tag_candidates()) {
        if (diam < gauge(tag)) {
            out.push_back({cell, std::move(tag)});
            return;
        }
    }
    if (depth >= budget)
        throw BudgetExceeded("cousin_partition: no admissible tag for " + cell.str() + " at depth " +
                             std::to_string(depth) + " (gauge '" + gauge.description() + "')");
    for (const auto& child : cell.bisect()) cousin_recurse(child, gauge, depth + 1, budget, out);
}

}  // namespace

TaggedPartition cousin_partition(const Box& box, const Gauge& gauge, int depth_budget) {
    if (depth_budget < 1) throw std::invalid_argument("cousin_partition: depth_budget must be >= 1");
    TaggedPartition tp{box, {}};
    cousin_recurse(box, gauge, 0, depth_budget, tp.cells);
    return tp;
}

namespace {

void random_recurse(const Box& cell, const Gauge& gauge, int depth, const RandomFineOptions& opt,
                    std::mt19937_64& rng, std::vector<TaggedCell>& out) {
    const double diam = cell.diameter();
    auto candidates = cell.tag_candidates();
    for (int r = 0; r < opt.random_tags; ++r) {
        // Random point on the 2^10 sub-grid of the cell, kept exact.
        std::vector<Rational> p;
        Point x;
        for (std::size_t i = 0; i < cell.dim(); ++i) {
            const auto j = static_cast<std::int64_t>(rng() % 1025U);
            p.push_back(cell.lo(i) + cell.side(i) * Rational(j, 1024));
            x.push_back(p.back().to_double());
        }
        candidates.push_back(std::move(x));
    }
    std::vector<std::size_t> admissible;
    for (std::size_t k = 0; k < candidates.size(); ++k)
        if (cell.contains(candidates[k]) && diam < gauge(candidates[k])) admissible.push_back(k);

    const double coin = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (!admissible.empty() && (coin < opt.stop_probability || depth >= opt.depth_budget)) {
        out.push_back({cell, candidates[admissible[rng() % admissible.size()]]});
        return;
    }
    if (depth >= opt.depth_budget)
        throw BudgetExceeded("random_fine_partition: no admissible tag for " + cell.str());
    for (const auto& child : cell.bisect()) random_recurse(child, gauge, depth + 1, opt, rng, out);
}

}  // namespace

TaggedPartition random_fine_partition(const Box& box, const Gauge& gauge, std::uint64_t seed,
                                      const RandomFineOptions& options) {
    std::mt19937_64 rng(seed);
    TaggedPartition tp{box, {}};
    random_recurse(box, gauge, 0, options, rng, tp.cells);
    return tp;
}

// ---------------------------------------------------------------------------
// Enumeration

void for_each_partition(const Box& box, std::span<const Rational> grid,
                        const std::function<void(const Partition&)>& visit) {
    if (box.dim() != 1) throw std::invalid_argument("enumerate_partitions supports 1-D boxes only");
    if (grid.size() < 2 || grid.front() != box.lo(0) || grid.back() != box.hi(0))
        throw std::invalid_argument("grid must start and end at the box endpoints");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] < grid[i])) throw std::invalid_argument("grid must be strictly increasing");
    const std::size_t interior = grid.size() - 2;
    if (interior >= 63) throw std::length_error("too many interior grid points to enumerate");

    const std::uint64_t count = std::uint64_t{1} << interior;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        Partition p{box, {}};
        Rational left = grid.front();
        for (std::size_t i = 0; i < interior; ++i) {
            if ((mask >> i) & 1U) {
                p.cells.push_back(Box::interval(left, grid[i + 1]));
                left = grid[i + 1];
            }
        }
        p.cells.push_back(Box::interval(left, grid.back()));
        visit(p);
    }
}

std::vector<Partition> enumerate_partitions(const Box& box, std::span<const Rational> grid) {
    std::vector<Partition> out;
    for_each_partition(box, grid, [&](const Partition& p) { out.push_back(p); });
    return out;
}

std::vector<Rational> dyadic_grid(const Box& box, int level) {
    if (box.dim() != 1) throw std::invalid_argument("dyadic_grid needs a 1-D box");
    std::vector<Rational> g;
    const std::int64_t n = std::int64_t{1} << level;
    for (std::int64_t j = 0; j <= n; ++j) g.push_back(box.lo(0) + box.side(0) * Rational(j, n));
    return g;
}

// ---------------------------------------------------------------------------
// Dyadic cells

Box DyadicCell::to_box(const Box& root) const {
    std::vector<Rational> lo, hi;
    const Rational scale = Rational::pow2(-depth);
    for (std::size_t i = 0; i < root.dim(); ++i) {
        const Rational step = root.side(i) * scale;
        const Rational start = root.lo(i) + step * Rational(static_cast<std::int64_t>(index[i]));
        lo.push_back(start);
        hi.push_back(start + step);
    }
    return Box(std::move(lo), std::move(hi));
}

std::vector<DyadicCell> DyadicCell::children() const {
    const std::size_t n = index.size();
    std::vector<DyadicCell> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
        DyadicCell c{depth + 1, index};
        for (std::size_t i = 0; i < n; ++i) c.index[i] = 2 * index[i] + ((k >> (n - 1 - i)) & 1U);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<DyadicCell> dyadic_cells(std::size_t dim, int depth) {
    std::vector<DyadicCell> cells{DyadicCell{0, std::vector<std::uint64_t>(dim, 0)}};
    for (int d = 0; d < depth; ++d) {
        std::vector<DyadicCell> next;
        for (const auto& c : cells)
            for (auto& ch : c.children()) next.push_back(std::move(ch));
        cells = std::move(next);
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

}  // namespace gauge
