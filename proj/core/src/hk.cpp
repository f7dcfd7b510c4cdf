#include "gauge/hk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "gauge/summation.hpp"

namespace gauge {

namespace {

// Gauss-Legendre nodes on [0,1] with the cumulative weights as sub-cell
// boundaries: node j lies in [lo[j], hi[j]] and hi[j] - lo[j] is its weight.
struct GaussRule {
    std::vector<double> node, lo, hi;
};

GaussRule make_rule(int m) {
    std::vector<double> x(m), w(m);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double prev = 1.0, p = z;
            for (int k = 2; k <= m; ++k) {
                const double next = ((2.0 * k - 1.0) * z * p - (k - 1.0) * prev) / k;
                prev = p;
                p = next;
            }
            dp = m * (z * p - prev) / (z * z - 1.0);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    GaussRule r;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        r.node.push_back((1.0 - x[i]) / 2.0);
        r.lo.push_back(acc);
        acc += w[i] / 2.0;
        r.hi.push_back(i + 1 == m ? 1.0 : acc);
    }
    return r;
}

const GaussRule& rule_for_dimension(std::size_t n) {
    static const GaussRule rules[4] = {make_rule(5), make_rule(4), make_rule(3), make_rule(2)};
    return rules[std::min<std::size_t>(n, 4) - 1];
}

std::string point_str(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt::format("{:.17g}", x[i]);
    return s + ")";
}

double eval_at(const PointFunction& f, std::span<const double> x) {
    double v;
    try {
        v = f(x);
    } catch (const EvalError& e) {
        throw EvalError(e.subexpression(), std::string(e.what()) + " at tag " + point_str(x));
    }
    if (!std::isfinite(v)) throw EvalError(f.name(), "non-finite value at tag " + point_str(x));
    return v;
}

struct Shared {
    const PointFunction& f;
    const IntervalFunction& g;
    std::uint64_t evaluations = 0;
    std::uint64_t budget = 0;
};

// Geometric chain of cells shrinking to a corner point c: the current corner
// cell is tagged at c, shells peeled off at each level are integrated apart.
struct Chain {
    int corner = 0;
    Point c;
    double fc = 0.0;
    double tail = 0.0;
    std::vector<double> shells;
    double shell_error = 0.0;
    double last_delta = 0.0, prev_delta = 0.0;
    int steps = 0;
};

struct Item {
    int depth = 0;
    std::vector<std::uint64_t> idx;
    double value = 0.0;
    std::vector<double> child_sums;
    double fine = 0.0;
    double defect = 0.0;
    double error = 0.0;
    // Heap key; for chains only the tail, since stepping cannot shrink shell errors.
    double priority = 0.0;
    int chain_child = -1;
    int chain_len = 0;
    std::array<double, 4> hist{};
    double parent_defect = -1.0;
    std::uint64_t serial = 0;
    bool alive = false;
    bool no_chain = false;
    std::unique_ptr<Chain> chain;
};

constexpr int kStallGenerations = 4;
constexpr double kStallRatio = 0.2;
constexpr double kStallFloor = 1e-3;

class Integrator {
public:
    Integrator(Shared& shared, std::vector<double> lo, std::vector<double> hi, double tol, int max_depth,
               bool allow_chains)
        : s_(shared), allow_chains_(allow_chains), n_(lo.size()), root_lo_(std::move(lo)), root_w_(n_), tol_(tol), max_depth_(max_depth),
          rule_(rule_for_dimension(n_)), x_(n_), sl_(n_), sh_(n_), clo_(n_), chi_(n_) {
        for (std::size_t i = 0; i < n_; ++i) root_w_[i] = hi[i] - root_lo_[i];
    }

    IntegralResult run();

private:
    struct HeapEntry {
        double error;
        std::uint64_t serial;
        std::size_t slot;
        bool operator<(const HeapEntry& o) const {
            if (error != o.error) return error < o.error;
            return serial > o.serial;
        }
    };

    void cell_bounds(int depth, const std::vector<std::uint64_t>& idx, std::vector<double>& lo,
                     std::vector<double>& hi) const {
        for (std::size_t i = 0; i < n_; ++i) {
            lo[i] = root_lo_[i] + root_w_[i] * std::ldexp(static_cast<double>(idx[i]), -depth);
            hi[i] = root_lo_[i] + root_w_[i] * std::ldexp(static_cast<double>(idx[i] + 1), -depth);
        }
    }

    static std::vector<std::uint64_t> child_index(const std::vector<std::uint64_t>& idx, std::size_t k) {
        std::vector<std::uint64_t> c(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) c[i] = 2 * idx[i] + ((k >> (idx.size() - 1 - i)) & 1U);
        return c;
    }

    double rule_sum(const std::vector<double>& lo, const std::vector<double>& hi) {
        const std::size_t m = rule_.node.size();
        std::size_t total = 1;
        for (std::size_t i = 0; i < n_; ++i) total *= m;
        double sum = 0.0;
        for (std::size_t t = 0; t < total; ++t) {
            std::size_t r = t;
            for (std::size_t i = n_; i-- > 0;) {
                const std::size_t j = r % m;
                r /= m;
                const double w = hi[i] - lo[i];
                x_[i] = lo[i] + w * rule_.node[j];
                sl_[i] = lo[i] + w * rule_.lo[j];
                sh_[i] = j + 1 == m ? hi[i] : lo[i] + w * rule_.hi[j];
            }
            const double gq = s_.g.increment(sl_, sh_);
            if (gq == 0.0) continue;
            ++s_.evaluations;
            sum += eval_at(s_.f, x_) * gq;
        }
        return sum;
    }

    std::vector<double> children_sums(int depth, const std::vector<std::uint64_t>& idx) {
        std::vector<double> out;
        const std::size_t count = std::size_t{1} << n_;
        out.reserve(count);
        std::vector<double> lo(n_), hi(n_);
        for (std::size_t k = 0; k < count; ++k) {
            cell_bounds(depth + 1, child_index(idx, k), lo, hi);
            out.push_back(rule_sum(lo, hi));
        }
        return out;
    }

    std::size_t new_slot() {
        if (!free_.empty()) {
            const std::size_t slot = free_.back();
            free_.pop_back();
            return slot;
        }
        items_.emplace_back();
        return items_.size() - 1;
    }

    void leaf_error(Item& it) const {
        it.defect = std::abs(it.value - it.fine);
        double r = 0.9;
        if (it.parent_defect > 0.0) r = std::min(it.defect / it.parent_defect, 0.9);
        else if (it.parent_defect == 0.0 && it.defect == 0.0) r = 0.0;
        it.error = it.defect / (1.0 - r);
        it.priority = it.error;
    }

    void chain_error(Item& it) const {
        const Chain& ch = *it.chain;
        double tail;
        if (ch.steps < 2) {
            tail = 9.0 * std::abs(ch.last_delta);
        } else {
            const double a = std::abs(ch.last_delta), b = std::abs(ch.prev_delta);
            double q = b > 0.0 ? a / b : (a > 0.0 ? 0.9 : 0.5);
            q = std::clamp(q, 0.25, 0.9);
            tail = q / (1.0 - q) * std::max(a, q * b);
        }
        it.defect = std::abs(ch.last_delta);
        it.error = tail + ch.shell_error;
        it.priority = tail;
    }

    void activate(std::size_t slot) {
        Item& it = items_[slot];
        it.alive = true;
        it.serial = next_serial_++;
        err_sum_ += it.error;
        max_depth_seen_ = std::max(max_depth_seen_, it.depth);
        heap_.push({it.priority, it.serial, slot});
    }

    void retire(std::size_t slot) {
        Item& it = items_[slot];
        err_sum_ -= it.error;
        it.alive = false;
        it.chain.reset();
        std::vector<double>().swap(it.child_sums);
        free_.push_back(slot);
    }

    void split(std::size_t slot);
    bool try_chain(std::size_t slot);
    void chain_step(std::size_t slot);
    void refine(std::size_t slot);
    std::optional<std::size_t> pop_worst();
    double global_sum() const;
    double exact_error_sum() const;

    Shared& s_;
    bool allow_chains_;
    std::size_t n_;
    std::vector<double> root_lo_, root_w_;
    double tol_;
    int max_depth_;
    const GaussRule& rule_;
    std::vector<double> x_, sl_, sh_, clo_, chi_;
    std::vector<Item> items_;
    std::vector<std::size_t> free_;
    std::priority_queue<HeapEntry> heap_;
    std::uint64_t next_serial_ = 0;
    double err_sum_ = 0.0;
    int max_depth_seen_ = 0;
};

void Integrator::split(std::size_t slot) {
    const int depth = items_[slot].depth;
    const std::vector<std::uint64_t> idx = items_[slot].idx;
    const std::vector<double> sums = items_[slot].child_sums;
    const double parent_defect = items_[slot].defect;
    const int parent_chain = items_[slot].chain_child;
    const int parent_len = items_[slot].chain_len;
    const std::array<double, 4> parent_hist = items_[slot].hist;
    retire(slot);
    for (std::size_t k = 0; k < sums.size(); ++k) {
        const std::size_t c = new_slot();
        Item& it = items_[c];
        it = Item{};
        it.depth = depth + 1;
        it.idx = child_index(idx, k);
        it.value = sums[k];
        it.child_sums = children_sums(it.depth, it.idx);
        it.fine = pairwise_sum(it.child_sums);
        it.parent_defect = parent_defect;
        it.chain_child = static_cast<int>(k);
        if (parent_chain == static_cast<int>(k)) {
            it.chain_len = parent_len + 1;
            it.hist = {parent_defect, parent_hist[0], parent_hist[1], parent_hist[2]};
        } else {
            it.chain_len = 1;
            it.hist = {parent_defect, 0.0, 0.0, 0.0};
        }
        leaf_error(it);
        activate(c);
    }
}

bool Integrator::try_chain(std::size_t slot) {
    Item& it = items_[slot];
    if (!allow_chains_ || it.no_chain || it.chain || it.chain_len < kStallGenerations) return false;
    if (!(it.hist[3] > 0.0) || it.defect < kStallRatio * it.hist[3]) return false;
    // Defects far below tolerance are rounding noise, not a singularity.
    if (it.defect < kStallFloor * tol_) return false;
    cell_bounds(it.depth, it.idx, clo_, chi_);
    auto ch = std::make_unique<Chain>();
    ch->corner = it.chain_child;
    ch->c.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const bool upper = (static_cast<std::size_t>(ch->corner) >> (n_ - 1 - i)) & 1U;
        ch->c[i] = upper ? chi_[i] : clo_[i];
    }
    try {
        ch->fc = s_.f(ch->c);
    } catch (const std::exception&) {
        it.no_chain = true;
        return false;
    }
    ++s_.evaluations;
    if (!std::isfinite(ch->fc)) {
        it.no_chain = true;
        return false;
    }
    ch->tail = ch->fc * s_.g.increment(clo_, chi_);
    err_sum_ -= it.error;
    it.alive = false;
    it.chain = std::move(ch);
    it.fine = it.chain->tail;
    it.child_sums.clear();
    chain_step(slot);
    err_sum_ -= items_[slot].error;
    items_[slot].alive = false;
    chain_step(slot);
    return true;
}

void Integrator::chain_step(std::size_t slot) {
    // Caller has removed this item's error from err_sum_ and marked it inactive.
    Item& it = items_[slot];
    Chain& ch = *it.chain;
    const double before = it.fine;
    const std::size_t count = std::size_t{1} << n_;
    std::vector<double> lo(n_), hi(n_);
    for (std::size_t k = 0; k < count; ++k) {
        if (static_cast<int>(k) == ch.corner) continue;
        cell_bounds(it.depth + 1, child_index(it.idx, k), lo, hi);
        const int sub_depth = std::max(8, max_depth_ - (it.depth + 1));
        const double share = tol_ / (4.0 * (ch.steps + 1) * (ch.steps + 2) * static_cast<double>(count - 1));
        // Shells stay clear of the singular corner, so they are integrated without chains.
        Integrator nested(s_, lo, hi, share, sub_depth, false);
        const IntegralResult r = nested.run();
        ch.shells.push_back(r.value);
        ch.shell_error += r.error_estimate;
        max_depth_seen_ = std::max(max_depth_seen_, it.depth + 1 + r.max_depth);
    }
    it.idx = child_index(it.idx, static_cast<std::size_t>(ch.corner));
    it.depth += 1;
    cell_bounds(it.depth, it.idx, lo, hi);
    ch.tail = ch.fc * s_.g.increment(lo, hi);
    ch.steps += 1;
    it.fine = pairwise_sum(ch.shells) + ch.tail;
    ch.prev_delta = ch.last_delta;
    ch.last_delta = it.fine - before;
    chain_error(it);
    activate(slot);
}

void Integrator::refine(std::size_t slot) {
    Item& it = items_[slot];
    if (it.depth >= max_depth_) {
        // Frozen: its error stays in the sum but it is never refined again.
        it.no_chain = true;
        return;
    }
    if (it.chain) {
        err_sum_ -= it.error;
        it.alive = false;
        chain_step(slot);
        return;
    }
    if (try_chain(slot)) return;
    split(slot);
}

std::optional<std::size_t> Integrator::pop_worst() {
    while (!heap_.empty()) {
        const HeapEntry e = heap_.top();
        heap_.pop();
        const Item& it = items_[e.slot];
        if (it.alive && it.serial == e.serial) return e.slot;
    }
    return std::nullopt;
}

double Integrator::global_sum() const {
    std::vector<double> v;
    for (const auto& it : items_)
        if (it.alive) v.push_back(it.fine);
    return pairwise_sum(v);
}

double Integrator::exact_error_sum() const {
    std::vector<double> v;
    for (const auto& it : items_)
        if (it.alive) v.push_back(it.error);
    return pairwise_sum(v);
}

IntegralResult Integrator::run() {
    {
        const std::size_t slot = new_slot();
        Item& it = items_[slot];
        it.idx.assign(n_, 0);
        cell_bounds(0, it.idx, clo_, chi_);
        it.value = rule_sum(clo_, chi_);
        it.child_sums = children_sums(0, it.idx);
        it.fine = pairwise_sum(it.child_sums);
        leaf_error(it);
        activate(slot);
    }
    IntegralResult result;
    double previous = std::numeric_limits<double>::quiet_NaN();
    while (s_.evaluations < s_.budget) {
        if (err_sum_ < tol_ / 2.0) {
            err_sum_ = exact_error_sum();
            if (err_sum_ < tol_ / 2.0) {
                const double g = global_sum();
                if (!std::isnan(previous) && std::abs(g - previous) < tol_ / 2.0) {
                    result.converged = true;
                    break;
                }
                previous = g;
                std::size_t alive = 0;
                for (const auto& it : items_) alive += it.alive ? 1 : 0;
                const std::size_t forced = std::max<std::size_t>(1, alive / 8);
                // Chains are left alone here: their estimates already model the
                // tail and a step costs more than all previous ones together.
                bool progressed = false;
                std::vector<std::size_t> skipped;
                for (std::size_t i = 0; i < forced && s_.evaluations < s_.budget;) {
                    auto slot = pop_worst();
                    if (!slot) break;
                    if (items_[*slot].chain) {
                        skipped.push_back(*slot);
                        continue;
                    }
                    ++i;
                    const int before = items_[*slot].depth;
                    refine(*slot);
                    progressed = progressed || items_[*slot].depth != before || !items_[*slot].alive;
                }
                for (std::size_t slot : skipped) heap_.push({items_[slot].priority, items_[slot].serial, slot});
                if (!progressed) {
                    // Nothing left to refine: the tree is frozen below tolerance.
                    result.converged = true;
                    break;
                }
                continue;
            }
        }
        auto slot = pop_worst();
        if (!slot) break;
        refine(*slot);
    }
    err_sum_ = exact_error_sum();
    result.value = global_sum();
    result.error_estimate = err_sum_;
    result.evaluations = s_.evaluations;
    result.max_depth = max_depth_seen_;
    if (result.converged && !(result.error_estimate <= tol_)) result.converged = false;

    std::vector<const Item*> alive;
    for (const auto& it : items_)
        if (it.alive) alive.push_back(&it);
    const std::size_t keep = std::min<std::size_t>(8, alive.size());
    std::partial_sort(alive.begin(), alive.begin() + static_cast<std::ptrdiff_t>(keep), alive.end(),
                      [](const Item* a, const Item* b) {
                          if (a->error != b->error) return a->error > b->error;
                          return a->serial < b->serial;
                      });
    std::vector<double> lo(n_), hi(n_);
    for (std::size_t i = 0; i < keep; ++i) {
        cell_bounds(alive[i]->depth, alive[i]->idx, lo, hi);
        std::vector<Rational> rlo, rhi;
        for (std::size_t a = 0; a < n_; ++a) {
            rlo.push_back(Rational::from_double(lo[a]));
            rhi.push_back(Rational::from_double(hi[a]));
        }
        result.worst_cells.push_back({Box(std::move(rlo), std::move(rhi)), alive[i]->defect});
    }
    return result;
}

}  // namespace

std::string IntegralResult::to_json() const {
    nlohmann::json j;
    j["value"] = value;
    j["error_estimate"] = error_estimate;
    j["evaluations"] = evaluations;
    j["max_depth"] = max_depth;
    j["converged"] = converged;
    auto cells = nlohmann::json::array();
    for (const auto& c : worst_cells)
        cells.push_back({{"cell", nlohmann::json::parse(c.cell.to_json())}, {"cauchy_defect", c.cauchy_defect}});
    j["worst_cells"] = cells;
    return j.dump(2);
}

std::string IntegralResult::csv_header() { return "value,error_estimate,evaluations,max_depth,converged"; }

std::string IntegralResult::csv_row() const {
    return fmt::format("{:.17g},{:.17g},{},{},{}", value, error_estimate, evaluations, max_depth,
                       converged ? "true" : "false");
}

double riemann_sum(const PointFunction& f, const IntervalFunction& g, const TaggedPartition& partition) {
    std::vector<double> terms;
    terms.reserve(partition.cells.size());
    for (const auto& tc : partition.cells) {
        if (!tc.cell.contains(tc.tag)) throw std::invalid_argument("tag " + point_str(tc.tag) + " outside its cell " + tc.cell.str());
        terms.push_back(eval_at(f, tc.tag) * g(tc.cell));
    }
    return pairwise_sum(terms);
}

IntegralResult hk_integrate(const PointFunction& f, const IntervalFunction& g, const Box& box, double tol,
                            const IntegrateOptions& options) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (!g.is_corner()) throw std::invalid_argument("hk_integrate needs a corner-generated interval function");
    if (g.dimension() != box.dim()) throw std::invalid_argument("interval function and box dimensions differ");
    if (g.domain() && !g.domain()->contains(box)) throw std::out_of_range("box outside the interval function domain");
    std::vector<double> lo(box.dim()), hi(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        lo[i] = box.lo(i).to_double();
        hi[i] = box.hi(i).to_double();
    }
    Shared shared{f, g, 0, options.budget};
    Integrator integrator(shared, lo, hi, tol, options.max_depth, true);
    return integrator.run();
}

}  // namespace gauge
