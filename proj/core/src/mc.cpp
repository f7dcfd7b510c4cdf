#include "gauge/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "gauge/parallel.hpp"

namespace gauge {

ControlFunction1D ControlFunction1D::from_function(Fn value, std::string description, Difference difference,
                                                   std::vector<Jump> jumps) {
    ControlFunction1D c;
    if (!difference) difference = [value](double y, double x) { return value(y) - value(x); };
    c.value_ = std::move(value);
    c.difference_ = std::move(difference);
    c.description_ = std::move(description);
    c.jumps_ = std::move(jumps);
    return c;
}

ControlFunction1D ControlFunction1D::from_point_function(const PointFunction& phi) {
    ControlFunction1D c = from_function([phi](double x) { return phi(x); }, phi.name());
    if (phi.expr()) c.expression_ = phi.expr()->str();
    return c;
}

ControlFunction1D ControlFunction1D::parse(std::string_view text) {
    return from_point_function(PointFunction::parse(text));
}

ControlFunction1D ControlFunction1D::identity() {
    ControlFunction1D c = from_function([](double x) { return x; }, "x", [](double y, double x) { return y - x; });
    c.expression_ = "x";
    return c;
}

ControlFunction1D ControlFunction1D::table(std::vector<std::pair<double, double>> samples, std::vector<Jump> jumps) {
    if (samples.size() < 2) throw std::invalid_argument("a control table needs at least two samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first))
            throw std::invalid_argument("control table abscissae must increase strictly");
        if (!(samples[i].second > samples[i - 1].second))
            throw InvalidControl(fmt::format("control table does not increase between {:.17g} and {:.17g}",
                                             samples[i - 1].first, samples[i].first));
    }
    auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(samples);
    auto value = [shared](double x) {
        const auto& s = *shared;
        auto it = std::upper_bound(s.begin(), s.end(), x, [](double v, const auto& p) { return v < p.first; });
        std::size_t i = static_cast<std::size_t>(it - s.begin());
        i = std::clamp<std::size_t>(i, 1, s.size() - 1);
        const auto& [x0, y0] = s[i - 1];
        const auto& [x1, y1] = s[i];
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    };
    ControlFunction1D c = from_function(value, fmt::format("table of {} samples", samples.size()), {}, std::move(jumps));
    c.samples_ = std::move(samples);
    return c;
}

std::optional<double> ControlFunction1D::headroom(double x) const {
    if (!headroom_) return std::nullopt;
    return headroom_(x);
}

ControlFunction1D ControlFunction1D::with_headroom(Fn headroom) const {
    ControlFunction1D c = *this;
    c.headroom_ = std::move(headroom);
    return c;
}

std::string ControlFunction1D::to_json() const {
    nlohmann::json j;
    j["description"] = description_;
    if (expression_) j["expression"] = *expression_;
    auto jumps = nlohmann::json::array();
    for (const auto& jp : jumps_) jumps.push_back({{"at", jp.at}, {"left", jp.left}, {"right", jp.right}});
    j["jumps"] = jumps;
    if (!samples_.empty()) {
        auto s = nlohmann::json::array();
        for (const auto& [x, y] : samples_) s.push_back({x, y});
        j["samples"] = s;
    }
    return j.dump();
}

// ---------------------------------------------------------------------------

Primitive1D closed_form_primitive(const PointFunction& F) {
    return {[F](double x) { return F(x); }, [F](double y, double x) { return F(y) - F(x); }, F.name()};
}

namespace {

double direct_integral(const PointFunction& f, double u, double v, double tol) {
    if (u == v) return 0.0;
    const double lo = std::min(u, v), hi = std::max(u, v);
    const Box box = Box::interval(Rational::from_double(lo), Rational::from_double(hi));
    const IntegralResult r = hk_integrate(f, IntervalFunction::volume(1), box, tol);
    if (!r.converged)
        throw BudgetExceeded(fmt::format("integral of {} over [{:.17g}, {:.17g}] did not converge", f.name(), lo, hi));
    return u < v ? r.value : -r.value;
}

}  // namespace

Primitive1D numerical_primitive(const PointFunction& f, double a, double b, int depth, double tol) {
    const Box root = Box::interval(Rational::from_double(a), Rational::from_double(b));
    const IntervalFunction table = indefinite_hk(f, IntervalFunction::volume(1), root, depth, tol);
    auto nodes = std::make_shared<const std::vector<std::pair<double, double>>>(primitive_nodes(table, 0));
    const double diff_tol = std::min(tol, 1e-13);
    auto value = [f, nodes, tol](double x) {
        const auto& n = *nodes;
        auto it = std::upper_bound(n.begin(), n.end(), x, [](double v, const auto& p) { return v < p.first; });
        std::size_t i = it == n.begin() ? 0 : static_cast<std::size_t>(it - n.begin()) - 1;
        i = std::min(i, n.size() - 1);
        return n[i].second + direct_integral(f, n[i].first, x, tol);
    };
    auto difference = [f, diff_tol](double y, double x) { return direct_integral(f, x, y, diff_tol); };
    return {value, difference, "primitive of " + f.name()};
}

// ---------------------------------------------------------------------------

std::vector<double> default_h_levels() {
    std::vector<double> h;
    for (int j = 3; j <= 16; ++j) h.push_back(std::ldexp(1.0, -j));
    return h;
}

std::vector<double> chebyshev_points(double a, double b, std::size_t n) {
    std::vector<double> x;
    for (std::size_t i = 0; i < n; ++i)
        x.push_back((a + b) / 2.0 + (b - a) / 2.0 * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * n)));
    std::sort(x.begin(), x.end());
    return x;
}

McPointRecord mc_defect(const Primitive1D& F, const PointFunction& f, const ControlFunction1D& phi, double x,
                        std::pair<double, double> domain, const McOptions& options) {
    const auto& h = options.h_levels;
    if (h.empty()) throw std::invalid_argument("no h levels");
    for (std::size_t j = 0; j < h.size(); ++j)
        if (!(h[j] > 0.0) || (j > 0 && !(h[j] < h[j - 1]))) throw std::invalid_argument("h levels must decrease and be positive");
    if (options.probes_per_level < 1) throw std::invalid_argument("probes per level must be positive");
    if (!(x > domain.first && x < domain.second))
        throw std::invalid_argument(fmt::format("sample {:.17g} is not interior to the domain", x));

    const double fx = f(x);
    const int P = options.probes_per_level;
    std::vector<double> level_max(h.size(), 0.0);
    std::vector<double> level_arg(h.size(), x);
    for (std::size_t j = 0; j < h.size(); ++j) {
        for (int i = 0; i < P; ++i) {
            const double step = h[j] * std::exp2(-8.0 * i / P);
            for (double sign : {-1.0, 1.0}) {
                const double y = x + sign * step;
                if (!(y > domain.first && y < domain.second) || y == x) continue;
                const double d = phi.difference(y, x);
                if (!((y > x && d > 0.0) || (y < x && d < 0.0)))
                    throw InvalidControl(fmt::format("control '{}' does not increase between {:.17g} and {:.17g}",
                                                     phi.description(), std::min(x, y), std::max(x, y)));
                const double num = F.difference(y, x) - fx * (y - x);
                const double q = std::abs(num) / std::abs(d);
                if (!std::isfinite(q))
                    throw EvalError(F.description, fmt::format("non-finite quotient at y = {:.17g}", y));
                if (q > level_max[j]) {
                    level_max[j] = q;
                    level_arg[j] = y;
                }
            }
        }
    }
    McPointRecord rec;
    rec.x = x;
    rec.h = h;
    rec.q.resize(h.size());
    double running = 0.0;
    for (std::size_t j = h.size(); j-- > 0;) {
        running = std::max(running, level_max[j]);
        rec.q[j] = running;
    }
    rec.witness_y = level_arg.back();
    rec.witness_q = rec.q.back();
    return rec;
}

McVerdict verify_mc(const Primitive1D& F, const PointFunction& f, const ControlFunction1D& phi,
                    std::pair<double, double> domain, const std::vector<double>& sample_points,
                    const McOptions& options) {
    McVerdict v;
    v.tol = options.tol;
    v.points = parallel_map<McPointRecord>(sample_points.size(), [&](std::size_t i) {
        McPointRecord rec = mc_defect(F, f, phi, sample_points[i], domain, options);
        const auto& q = rec.q;
        rec.pass = true;
        if (!(q.back() <= options.tol)) {
            rec.pass = false;
            rec.reason = fmt::format("q(h_min) = {:.6g} exceeds tol {:.3g}", q.back(), options.tol);
        }
        for (std::size_t j = q.size() >= 3 ? q.size() - 2 : 1; j < q.size(); ++j) {
            if (q[j] > 2.0 * q[j - 1]) {
                rec.pass = false;
                if (rec.reason.empty()) rec.reason = "quotients grow over the last levels";
            }
        }
        return rec;
    });
    v.pass = std::all_of(v.points.begin(), v.points.end(), [](const auto& p) { return p.pass; });
    return v;
}

std::vector<double> McVerdict::failing_points() const {
    std::vector<double> out;
    for (const auto& p : points)
        if (!p.pass) out.push_back(p.x);
    return out;
}

std::string McVerdict::to_json() const {
    nlohmann::json j;
    j["pass"] = pass;
    j["tol"] = tol;
    auto pts = nlohmann::json::array();
    for (const auto& p : points) {
        nlohmann::json r;
        r["x"] = p.x;
        r["h"] = p.h;
        r["q"] = p.q;
        r["pass"] = p.pass;
        r["witness_y"] = p.witness_y;
        r["witness_q"] = p.witness_q;
        if (!p.reason.empty()) r["reason"] = p.reason;
        pts.push_back(r);
    }
    j["points"] = pts;
    return j.dump(2);
}

std::string McVerdict::to_csv() const {
    std::string out = "x,h,q,point_pass\n";
    for (const auto& p : points)
        for (std::size_t j = 0; j < p.h.size(); ++j)
            out += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", p.x, p.h[j], p.q[j], p.pass ? "true" : "false");
    return out;
}

}  // namespace gauge
