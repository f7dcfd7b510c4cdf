#include <cmath>

#include <fmt/format.h>

#include "gauge/report.hpp"
#include "settings.hpp"

namespace gaugecalc {

using namespace gauge;

Outcome run_integrate(const Settings& s) {
    const Box box = parse_box(s.box);
    const PointFunction f = parse_function(s.f, "--f");
    const IntervalFunction G = parse_measure(s.G, box.dim());
    IntegrateOptions opts;
    opts.budget = s.budget;
    if (s.depth) opts.max_depth = *s.depth;
    const IntegralResult r = hk_integrate(f, G, box, s.tol.value_or(1e-6), opts);
    Outcome out;
    out.csv = IntegralResult::csv_header() + "\n" + r.csv_row() + "\n";
    out.json = nlohmann::json::parse(r.to_json());
    out.pass = r.converged;
    if (!r.converged)
        out.message = fmt::format("not converged: error estimate {:.3g} after {} evaluations", r.error_estimate,
                                  r.evaluations);
    return out;
}

Outcome run_indefinite(const Settings& s) {
    const Box box = parse_box(s.box);
    const PointFunction f = parse_function(s.f, "--f");
    const IntervalFunction G = parse_measure(s.G, box.dim());
    const IntervalFunction table = indefinite_hk(f, G, box, s.depth.value_or(4), s.tol.value_or(1e-8), s.budget);
    Outcome out;
    out.csv = indefinite_csv(table);
    auto rows = nlohmann::json::array();
    for (const auto& [cell, value] : table.entries()) rows.push_back({{"cell", cell.str()}, {"value", value}});
    out.json = {{"root", box.str()}, {"depth", table.depth()}, {"cells", rows}};
    return out;
}

Outcome run_variation(const Settings& s) {
    const Box box = parse_box(s.box);
    const IntervalFunction F = IntervalFunction::corner(parse_function(s.F, "--F"), box.dim());
    const PointFunction f = parse_function(s.f.empty() ? "0" : s.f, "--f");
    const IntervalFunction G = parse_measure(s.G, box.dim());
    const BoxTagFunction psi = [&](const Box& q, std::span<const double> x) { return F(q) - f(x) * G(q); };
    const Gauge delta = Gauge::constant(s.delta);
    const int depth = s.depth.value_or(3);
    if (depth < 0 || depth > 24) throw UsageError("--depth must lie in [0, 24]");

    auto show = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("infeasible"); };
    const auto dp = delta_variation_dp(psi, box, delta, depth);
    Outcome out;
    out.csv = "method,value\n" + fmt::format("dp,{}\n", show(dp));
    out.json = {{"dp", dp ? nlohmann::json(*dp) : nlohmann::json()}};
    if (box.dim() == 1 && depth <= 4) {
        const auto grid = dyadic_grid(box, depth);
        const auto brute = delta_variation_bruteforce(psi, box, delta, grid);
        out.csv += fmt::format("bruteforce,{}\n", show(brute));
        out.json["bruteforce"] = brute ? nlohmann::json(*brute) : nlohmann::json();
        // The two classes of partitions and tags differ, so disagreement is informative, not a failure.
        out.json["agree"] = dp == brute;
    }
    return out;
}

}  // namespace gaugecalc
