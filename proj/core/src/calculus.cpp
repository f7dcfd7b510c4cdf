#include "gauge/calculus.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "gauge/limits.hpp"
#include "gauge/parallel.hpp"

namespace gauge {

std::string IdentityReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["residual"] = residual;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["inputs"] = inputs;
    return j.dump(2);
}

std::string IdentityReport::csv_header() { return "name,lhs,rhs,residual,pass"; }

std::string IdentityReport::csv_row() const {
    return fmt::format("{},{:.17g},{:.17g},{:.17g},{}", name, lhs, rhs, residual, pass ? "true" : "false");
}

namespace {

double integrate(const PointFunction& f, const Rational& a, const Rational& b, double tol) {
    const IntegralResult r = hk_integrate(f, IntervalFunction::volume(1), Box::interval(a, b), tol);
    if (!r.converged)
        throw BudgetExceeded(fmt::format("integral of {} over [{}, {}] did not converge (error {:.3g})", f.name(),
                                         a.str(), b.str(), r.error_estimate));
    return r.value;
}

double limit_at(const PointFunction& F, double x, Side side, double width) {
    LimitOptions opts;
    opts.h0 = std::min(1e-3, width / 4.0);
    return one_sided_limit([&](double t) { return F(t); }, x, side, opts).value;
}

IdentityReport finish(std::string name, double lhs, double rhs, double tol, std::map<std::string, std::string> inputs) {
    IdentityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = std::abs(lhs - rhs);
    r.tolerance = tol;
    r.pass = r.residual <= tol;
    r.inputs = std::move(inputs);
    return r;
}

}  // namespace

IdentityReport check_parts(const PointFunction& f, const PointFunction& F, const PointFunction& g,
                           const PointFunction& G, const Rational& a, const Rational& b, double tol) {
    if (!(a < b)) throw std::invalid_argument("check_parts needs a < b");
    const double ad = a.to_double(), bd = b.to_double(), w = bd - ad;
    const PointFunction FG = F * G;
    const double bracket = limit_at(FG, bd, Side::Left, w) - limit_at(FG, ad, Side::Right, w);
    const double lhs = integrate(f * G, a, b, tol / 10.0);
    const double rhs = bracket - integrate(F * g, a, b, tol / 10.0);
    return finish("parts", lhs, rhs, tol,
                  {{"f", f.name()}, {"F", F.name()}, {"g", g.name()}, {"G", G.name()}, {"a", a.str()}, {"b", b.str()}});
}

IdentityReport check_change_of_variables(const PointFunction& F, const PointFunction& f, const PointFunction& g,
                                         const Rational& a, const Rational& b, double tol) {
    if (!(a < b)) throw std::invalid_argument("check_change_of_variables needs a < b");
    std::map<std::string, std::string> inputs{
        {"F", F.name()}, {"f", f.name()}, {"g", g.name()}, {"a", a.str()}, {"b", b.str()}};
    const double ad = a.to_double(), bd = b.to_double(), w = bd - ad;
    constexpr int samples = 257;
    double prev_x = 0.0, prev = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = ad + w * (i + 0.5) / samples;
        const double v = F(x);
        if (i > 0 && !(v > prev)) {
            inputs["witness"] = fmt::format("F({:.17g}) >= F({:.17g})", prev_x, x);
            IdentityReport r = finish("change", 0.0, 0.0, tol, std::move(inputs));
            r.pass = false;
            return r;
        }
        prev_x = x;
        prev = v;
    }
    const double c = limit_at(F, ad, Side::Right, w);
    const double d = limit_at(F, bd, Side::Left, w);
    const double lhs = integrate(g, Rational::from_double(c), Rational::from_double(d), tol / 10.0);
    const double rhs = integrate(compose(g, F) * f, a, b, tol / 10.0);
    return finish("change", lhs, rhs, tol, std::move(inputs));
}

IdentityReport check_interval_additivity(const PointFunction& f, const Rational& a, const Rational& b,
                                         const Rational& c, double tol) {
    if (!(a < b && b < c)) throw std::invalid_argument("check_interval_additivity needs a < b < c");
    const double whole = integrate(f, a, c, tol / 4.0);
    const double left = integrate(f, a, b, tol / 4.0);
    const double right = integrate(f, b, c, tol / 4.0);
    return finish("additivity", whole, left + right, tol,
                  {{"f", f.name()}, {"a", a.str()}, {"b", b.str()}, {"c", c.str()}});
}

MonotoneVerdict check_monotone(const IntervalFunction& F_table, const PointFunction& f,
                               const std::vector<Point>& sample_points, double tol) {
    MonotoneVerdict v;
    for (const auto& x : sample_points) {
        if (f(x) < 0.0) {
            v.negative_sample = x;
            return v;
        }
    }
    v.precondition_ok = true;
    v.min_cell = std::numeric_limits<double>::infinity();
    for (const auto& [box, value] : F_table.entries()) {
        if (value < v.min_cell) {
            v.min_cell = value;
            v.worst_cell = box;
        }
    }
    v.pass = v.min_cell >= -tol;
    return v;
}

ConstancyReport constancy_check(const std::function<double(double)>& F1, const std::function<double(double)>& F2,
                                const std::vector<double>& sample_points, double tol) {
    if (sample_points.empty()) throw std::invalid_argument("constancy_check needs samples");
    std::vector<double> d;
    for (double x : sample_points) d.push_back(F1(x) - F2(x));
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    ConstancyReport r;
    r.constant = mean;
    for (double v : d) r.deviation = std::max(r.deviation, std::abs(v - mean));
    r.pass = r.deviation <= tol;
    return r;
}

// ---------------------------------------------------------------------------

MctReport mct_experiment(const std::function<PointFunction(int)>& f_k, const PointFunction& f, const Rational& a,
                         const Rational& b, int K, double tol, const std::optional<Primitive1D>& F,
                         const MctOptions& options) {
    if (K < 4) throw std::invalid_argument("mct_experiment needs K >= 4");
    if (!(a < b)) throw std::invalid_argument("mct_experiment needs a < b");
    MctReport rep;
    const auto values = parallel_map<double>(static_cast<std::size_t>(K), [&](std::size_t i) {
        return integrate(f_k(static_cast<int>(i) + 1), a, b, options.integration_tol);
    });
    for (int k = 1; k <= K; ++k) rep.integrals.emplace_back(k, values[static_cast<std::size_t>(k) - 1]);
    rep.nondecreasing = true;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1] - 2.0 * options.integration_tol) rep.nondecreasing = false;

    auto I = [&](int k) { return values[static_cast<std::size_t>(k) - 1]; };
    rep.converged = std::abs(I(K) - I(K - 1)) < tol / 2.0 && std::abs(I(K - 1) - I(K - 2)) < tol / 2.0;
    if (rep.converged) {
        const double d2 = I(K) - I(K / 2), d1 = I(K / 2) - I(K / 4);
        const double r = d1 != 0.0 ? d2 / d1 : 0.0;
        rep.limit = (r > 0.0 && r < 1.0) ? I(K) + d2 * r / (1.0 - r) : I(K);
    } else {
        rep.diverged = true;
        rep.diagnostic = fmt::format("no limit: successive integrals {:.6g}, {:.6g}, {:.6g} at k = {}..{}", I(K - 2),
                                     I(K - 1), I(K), K - 2, K);
        return rep;
    }

    try {
        rep.reference = integrate(f, a, b, tol / 4.0);
    } catch (const std::exception& e) {
        rep.diagnostic = std::string("reference integral failed: ") + e.what();
    }

    const double ad = a.to_double(), bd = b.to_double();
    std::vector<double> grid;
    for (std::size_t i = 1; i <= options.grid_points; ++i)
        grid.push_back(ad + (bd - ad) * static_cast<double>(i) / static_cast<double>(options.grid_points + 1));

    MctInput in;
    in.a = ad;
    in.b = bd;
    in.f_k = f_k;
    in.F_k = [&](int k) { return numerical_primitive(f_k(k), ad, bd, options.primitive_depth, options.integration_tol); };
    in.phi_k = [ad, bd](int) { return rescale(ControlFunction1D::identity(), 1.0 / (bd - ad), -ad / (bd - ad)); };
    in.F = F ? *F : numerical_primitive(f, ad, bd, options.primitive_depth, options.integration_tol);
    try {
        const MctControl ctl = mct_control(in, K, grid);
        rep.subsequence = ctl.subsequence;
        rep.control_verdict = verify_mc(in.F, f, ctl.phi, {ad, bd}, grid, options.verify);
    } catch (const MctDivergence& e) {
        rep.diverged = true;
        rep.converged = false;
        rep.limit.reset();
        rep.diagnostic = e.what();
    }
    return rep;
}

std::string MctReport::to_csv() const {
    std::string out = "k,integral\n";
    for (const auto& [k, v] : integrals) out += fmt::format("{},{:.17g}\n", k, v);
    return out;
}

std::string MctReport::to_json() const {
    nlohmann::json j;
    auto rows = nlohmann::json::array();
    for (const auto& [k, v] : integrals) rows.push_back({{"k", k}, {"integral", v}});
    j["integrals"] = rows;
    j["nondecreasing"] = nondecreasing;
    j["converged"] = converged;
    j["diverged"] = diverged;
    j["limit"] = limit ? nlohmann::json(*limit) : nlohmann::json();
    j["reference"] = reference ? nlohmann::json(*reference) : nlohmann::json();
    j["subsequence"] = subsequence;
    if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
    if (control_verdict) {
        j["control_pass"] = control_verdict->pass;
        j["control_verdict"] = nlohmann::json::parse(control_verdict->to_json());
    }
    return j.dump(2);
}

}  // namespace gauge
