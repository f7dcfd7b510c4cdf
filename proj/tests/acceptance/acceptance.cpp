// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gauge/calculus.hpp"
#include "gauge/hk.hpp"
#include "gauge/mc.hpp"
#include "gauge/parallel.hpp"
#include "gauge/report.hpp"

using namespace gauge;

namespace {

struct Result {
    bool pass = true;
    std::string csv;     // compared across thread counts
    std::string detail;  // timings and summaries, not compared
};

PointFunction P(const std::string& text) { return PointFunction::parse(text); }
Rational R(const char* text) { return Rational::parse(text); }
const Box kUnit = Box::interval(Rational(0), Rational(1));

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Result integral_case(const PointFunction& f, const IntervalFunction& G, double tol, double oracle, double within,
                     bool timed) {
    const auto t0 = std::chrono::steady_clock::now();
    const IntegralResult r = hk_integrate(f, G, kUnit, tol);
    const double t = seconds_since(t0);
    Result out;
    const double err = std::abs(r.value - oracle);
    out.pass = r.converged && err <= within;
    if (timed) out.pass = out.pass && r.evaluations <= 10'000'000 && t < 60.0;
    out.csv = fmt::format("{},{},{}\n", format_double(r.value), r.evaluations, r.converged);
    out.detail = fmt::format("value {} |error| {:.3g} evaluations {} in {:.2f} s", format_double(r.value), err,
                             r.evaluations, t);
    return out;
}

Result criterion1() {
    return integral_case(P("hk_derivative"), IntervalFunction::volume(1), 1e-4, std::sin(1.0), 1e-4, true);
}

Result criterion2() {
    return integral_case(P("inv_sqrt"), IntervalFunction::volume(1), 1e-4, 2.0, 1e-4, true);
}

Result criterion3() {
    return integral_case(P("x"), IntervalFunction::corner(P("heaviside_1/2"), 1), 1e-10, 0.5, 1e-9, false);
}

// Psi = c |Q|^p with a constant gauge: the tag never affects fineness, so the
// dyadic DP and the grid enumeration range over the same configurations.
Result criterion4() {
    std::mt19937_64 rng(20240401);
    Result out;
    double slowest = 0.0;
    int comparisons = 0;
    for (int i = 0; i < 50; ++i) {
        const double c = std::ldexp(static_cast<double>(static_cast<int>(rng() % 17) - 8), -3);
        const int p = 1 + static_cast<int>(rng() % 2);
        const int j = static_cast<int>(rng() % 5);
        const bool unbounded = rng() % 4 == 0;
        const Gauge delta = Gauge::constant(unbounded ? std::numeric_limits<double>::infinity()
                                                      : std::ldexp(1.0, -j) + std::ldexp(1.0, -10));
        const BoxTagFunction psi = [c, p](const Box& q, std::span<const double>) {
            return c * std::pow(q.volume(), p);
        };
        const auto t0 = std::chrono::steady_clock::now();
        for (int level = 0; level <= 3; ++level) {
            const auto grid = dyadic_grid(kUnit, level);
            const auto dp = delta_variation_dp(psi, kUnit, delta, level);
            const auto bf = delta_variation_bruteforce(psi, kUnit, delta, grid);
            const bool same = dp.has_value() == bf.has_value() && (!dp || *dp == *bf);
            out.pass = out.pass && same;
            out.csv += fmt::format("{},{},{}\n", i, level, dp ? format_double(*dp) : "none");
            if (!same)
                out.detail += fmt::format("mismatch psi {} c={} p={} level {}; ", i, format_double(c), p, level);
            ++comparisons;
        }
        const double t = seconds_since(t0);
        slowest = std::max(slowest, t);
        out.pass = out.pass && t < 5.0;
    }
    out.detail += fmt::format("{} exact comparisons, slowest Psi {:.3f} s", comparisons, slowest);
    return out;
}

std::vector<double> chebyshev_with_zero() {
    auto pts = chebyshev_points(-1.0, 1.0, 16);
    pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    return pts;
}

Result criterion5() {
    const auto pts = chebyshev_with_zero();
    const auto id = ControlFunction1D::identity();
    const std::pair<double, double> dom{-1.0, 1.0};
    McOptions fine;
    fine.h_levels.clear();
    for (int k = 3; k <= 30; ++k) fine.h_levels.push_back(std::ldexp(1.0, -k));

    const auto smooth = verify_mc(closed_form_primitive(P("x^2/2")), P("x"), id, dom, pts);
    const auto hk = verify_mc(closed_form_primitive(P("hk_primitive")), P("hk_derivative"), id, dom, pts, fine);
    const auto kink = verify_mc(closed_form_primitive(P("abs(x)")), P("0"), id, dom, pts);

    const auto at_zero = std::find_if(kink.points.begin(), kink.points.end(), [](const auto& r) { return r.x == 0.0; });
    const bool zero_fails = at_zero != kink.points.end() && !at_zero->pass;
    const double witness = zero_fails ? at_zero->witness_q : 0.0;
    Result out;
    out.pass = smooth.pass && hk.pass && zero_fails && std::abs(witness - 1.0) <= 1e-12;
    out.csv = smooth.to_csv() + hk.to_csv() + kink.to_csv();
    out.detail = fmt::format("x^2/2 {}, hk_primitive {}, |x| {} (witness q at 0 = {})", smooth.pass ? "pass" : "fail",
                             hk.pass ? "pass" : "fail", kink.pass ? "pass" : "fail", format_double(witness));
    return out;
}

// Triples decided far from the tolerance: f = F' gives q ~ 1e-5, a shifted f gives q > 1e-2.
Result criterion6() {
    std::mt19937_64 rng(6);
    const std::vector<std::string> controls{"x", "x + x^3", "exp(x)", "2*x + sin(x)"};
    const auto pts = chebyshev_points(-1.0, 1.0, 8);
    const std::pair<double, double> dom{-1.0, 1.0};
    Result out;
    int passes = 0;
    for (int i = 0; i < 20; ++i) {
        auto coef = [&] { return static_cast<int>(rng() % 5) - 2; };
        const int a = coef(), b = coef(), c = coef();
        const std::string F = fmt::format("({})*x^3 + ({})*x^2 + ({})*x", a, b, c);
        std::string f = fmt::format("3*({})*x^2 + 2*({})*x + ({})", a, b, c);
        if (rng() % 2 == 0) f += fmt::format(" + {}/2", 1 + rng() % 2);
        const auto phi = ControlFunction1D::parse(controls[rng() % controls.size()]);
        const auto prim = closed_form_primitive(P(F));
        const auto base = verify_mc(prim, P(f), phi, dom, pts).failing_points();
        passes += base.empty() ? 1 : 0;
        out.csv += fmt::format("{},{}", i, base.size());
        for (double alpha : {0.5, 2.0, 10.0}) {
            const auto scaled = verify_mc(prim, P(f), rescale(phi, alpha, 1.0), dom, pts).failing_points();
            out.csv += fmt::format(",{}", scaled.size());
            if (scaled != base) {
                out.pass = false;
                out.detail += fmt::format("triple {} alpha {} changes the failing set; ", i, alpha);
            }
        }
        out.csv += "\n";
    }
    out.detail += fmt::format("20 triples ({} passing, {} failing), failing sets unchanged under alpha 1/2, 2, 10",
                              passes, 20 - passes);
    return out;
}

// Nonnegative polynomials on [0,1]: c (a x - b)^2 + d x^k with c > 0, d >= 0.
Result criterion7() {
    std::mt19937_64 rng(7);
    Result out;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        const int a = 1 + static_cast<int>(rng() % 4), b = static_cast<int>(rng() % 4);
        const int c = 1 + static_cast<int>(rng() % 2), d = static_cast<int>(rng() % 3), k = 1 + static_cast<int>(rng() % 4);
        const std::string text = fmt::format("{}*({}*x - {})^2 + {}*x^{}", c, a, b, d, k);
        const PointFunction f = P(text);
        const auto table = indefinite_hk(f, IntervalFunction::volume(1), kUnit, 6, 1e-10);
        std::vector<Point> samples;
        for (int s = 0; s <= 64; ++s) samples.push_back({s / 64.0});
        const auto v = check_monotone(table, f, samples, 1e-10);
        out.pass = out.pass && v.precondition_ok && v.pass;
        worst = std::min(worst, v.min_cell);
        out.csv += fmt::format("{},{}\n", text, format_double(v.min_cell));
        if (!v.pass) out.detail += fmt::format("{} has a cell at {}; ", text, format_double(v.min_cell));
    }
    out.detail += fmt::format("20 polynomials, smallest cell value {}", format_double(worst));
    return out;
}

Result criterion8() {
    const auto table = indefinite_hk(P("2*x"), IntervalFunction::volume(1), kUnit, 6, 1e-10);
    const auto n0 = primitive_nodes(table, 0);
    const auto n1 = primitive_nodes(table, 32);
    std::vector<double> xs;
    std::map<double, double> F1, F2;
    for (std::size_t i = 0; i < n0.size(); ++i) {
        xs.push_back(n0[i].first);
        F1[n0[i].first] = n0[i].second;
        F2[n1[i].first] = n1[i].second;
    }
    const auto r = constancy_check([&](double x) { return F1.at(x); }, [&](double x) { return F2.at(x); }, xs, 1e-6);
    Result out;
    out.pass = r.pass;
    out.csv = fmt::format("{},{}\n", format_double(r.constant), format_double(r.deviation));
    out.detail = fmt::format("bases 0 and 1/2: constant {} deviation {:.3g} over {} nodes", format_double(r.constant),
                             r.deviation, xs.size());
    return out;
}

Result criterion9() {
    std::vector<IdentityReport> reps;
    reps.push_back(check_parts(P("1"), P("x"), P("1"), P("x"), R("0"), R("1"), 1e-6));
    reps.push_back(check_parts(P("cos(x)"), P("sin(x)"), P("1"), P("x"), R("0"), R("1"), 1e-6));
    reps.push_back(check_parts(P("0"), P("0"), P("0"), P("0"), R("0"), R("1"), 1e-6));
    reps.push_back(check_change_of_variables(P("x^2"), P("2*x"), P("1"), R("0"), R("1"), 1e-6));
    reps.push_back(check_change_of_variables(P("x^2"), P("2*x"), P("sqrt(x)"), R("0"), R("1"), 1e-6));
    reps.push_back(check_change_of_variables(P("exp(x)"), P("exp(x)"), P("1/x"), R("0"), R("1"), 1e-6));
    reps.push_back(check_interval_additivity(P("1"), R("0"), R("1"), R("2"), 1e-6));
    reps.push_back(check_interval_additivity(P("inv_sqrt"), R("0"), R("1/4"), R("1"), 1e-3));
    reps.push_back(check_interval_additivity(P("hk_derivative"), R("0"), R("1/2"), R("1"), 1e-3));
    Result out;
    out.csv = IdentityReport::csv_header() + "\n";
    double worst = 0.0;
    for (const auto& r : reps) {
        out.pass = out.pass && r.pass;
        out.csv += r.csv_row() + "\n";
        worst = std::max(worst, r.residual / r.tolerance);
        if (!r.pass) out.detail += fmt::format("{} residual {:.3g}; ", r.name, r.residual);
    }
    out.detail += fmt::format("9 identities, largest residual/tolerance {:.3g}", worst);
    return out;
}

Result criterion10() {
    auto fk = [](int k) { return P(fmt::format("min({}, 1/sqrt(x))", k)); };
    const auto rep = mct_experiment(fk, P("inv_sqrt"), R("0"), R("1"), 64, 1e-3, closed_form_primitive(P("2*sqrt(x)")));
    const auto div = mct_experiment([](int k) { return PointFunction::constant(k); }, P("1"), R("0"), R("1"), 64, 1e-3);
    const bool control_ok = rep.control_verdict && rep.control_verdict->pass && rep.control_verdict->points.size() == 33;
    Result out;
    out.pass = rep.nondecreasing && rep.converged && rep.limit && std::abs(*rep.limit - 2.0) <= 1e-3 && control_ok &&
               div.diverged && !div.limit;
    out.csv = rep.to_csv() + (rep.limit ? format_double(*rep.limit) : "none") + "\n" + div.to_csv();
    out.detail = fmt::format("I_64 {}, limit {}, control {}, f_k = k {}",
                             format_double(rep.integrals.back().second),
                             rep.limit ? format_double(*rep.limit) : "none", control_ok ? "pass" : "fail",
                             div.diverged ? "diverges" : "no divergence verdict");
    return out;
}

Result criterion11() {
    const PointFunction f = P("2*x");
    const IntervalFunction G = IntervalFunction::volume(1);
    const double eps = 0.01;
    Result out;

    // Control to gauge: Phi = |Q|, F the indefinite integral.
    const IntervalFunction F = indefinite_hk(f, G, kUnit, 8, 1e-9);
    const SuperadditiveFn volume = SuperadditiveFn::volume_power(1.0);
    const Gauge delta = gauge_from_control(F, f, G, volume, eps, kUnit, 8, 4);
    const double target = F(kUnit), bound = eps * volume(kUnit);
    double worst = 0.0;
    int fine = 0;
    auto record = [&](const TaggedPartition& p) {
        const bool ok = is_delta_fine(p, delta);
        fine += ok ? 1 : 0;
        const double defect = std::abs(riemann_sum(f, G, p) - target);
        worst = std::max(worst, defect);
        out.pass = out.pass && ok && defect < bound;
        out.csv += fmt::format("{},{}\n", p.cells.size(), format_double(defect));
    };
    record(cousin_partition(kUnit, delta));
    for (std::uint64_t seed = 1; seed < 100; ++seed) record(random_fine_partition(kUnit, delta, seed));

    // Gauges to control, on a finer table.
    const IntervalFunction F10 = indefinite_hk(f, G, kUnit, 10, 1e-9);
    const BoxTagFunction psi = [&](const Box& q, std::span<const double> x) { return F10(q) - f(x) * G(q); };
    std::vector<Gauge> gauges;
    for (int k = 1; k <= 6; ++k) {
        auto g = find_certified_gauge(psi, kUnit, k, 10);
        if (!g) {
            out.pass = false;
            out.detail = fmt::format("no certified gauge for k = {}", k);
            return out;
        }
        gauges.push_back(*g);
    }
    const SuperadditiveFn Phi = control_from_gauges(psi, gauges, kUnit, 10);
    double min_phi = std::numeric_limits<double>::infinity();
    for (const auto& [box, value] : *Phi.entries()) min_phi = std::min(min_phi, value);
    const double defect = superadditivity_defect(Phi);
    std::vector<Point> pts;
    for (double x : chebyshev_points(0.0, 1.0, 33)) pts.push_back({x});
    const McNdVerdict v = verify_mc_nd(F10, f, G, Phi, kUnit, pts, 6, 10, 1e-3);
    out.pass = out.pass && min_phi > 0.0 && defect <= 1e-12 && v.pass;
    out.csv += fmt::format("{},{},{}\n", format_double(min_phi), format_double(defect), v.pass);
    out.detail = fmt::format("{} of 100 partitions delta-fine, worst |sum - F(I)| {:.3g} < {}; control min {:.3g}, "
                             "superadditivity defect {:.3g}, verifier {}",
                             fine, worst, bound, min_phi, defect, v.pass ? "pass" : "fail");
    return out;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Result()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {1, "hk_derivative on [0,1] equals sin(1)", criterion1},
        {2, "inv_sqrt on [0,1] equals 2", criterion2},
        {3, "x dG with a jump at 1/2 equals 1/2", criterion3},
        {4, "delta-variation DP equals brute force", criterion4},
        {5, "verify_mc discriminates", criterion5},
        {6, "verify_mc invariant under rescaling", criterion6},
        {7, "indefinite tables of nonnegative f are nonnegative", criterion7},
        {8, "indefinite tables differ by a constant", criterion8},
        {9, "calculus identities", criterion9},
        {10, "monotone convergence", criterion10},
        {11, "control and gauge round trip", criterion11},
    };
    return list;
}

}  // namespace

int main() {
    bool all = true;
    auto report = [&](int id, const char* title, bool pass, const std::string& detail) {
        all = all && pass;
        std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
        std::fflush(stdout);
    };

    std::vector<std::string> csv_parallel;
    {
        const ScopedThreadCount threads(4);
        for (const auto& c : criteria()) {
            Result r;
            try {
                r = c.run();
            } catch (const std::exception& e) {
                r.pass = false;
                r.detail = std::string("exception: ") + e.what();
            }
            report(c.id, c.title, r.pass, r.detail);
            csv_parallel.push_back(r.csv);
        }
    }

    std::vector<int> differing;
    {
        const ScopedThreadCount threads(1);
        for (std::size_t i = 0; i < criteria().size(); ++i) {
            std::string csv;
            try {
                csv = criteria()[i].run().csv;
            } catch (const std::exception& e) {
                csv = std::string("exception: ") + e.what();
            }
            if (csv != csv_parallel[i]) differing.push_back(criteria()[i].id);
        }
    }
    std::string which;
    for (int id : differing) which += (which.empty() ? "" : ", ") + std::to_string(id);
    report(12, "identical CSV with 1 and 4 threads", differing.empty(),
           differing.empty() ? "criteria 1-11 byte-identical" : "differs for " + which);
    return all ? 0 : 1;
}
