#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gauge/report.hpp"
#include "settings.hpp"

namespace gaugecalc {

using namespace gauge;

namespace {

// Closed-form corner F when --F is given, else the indefinite table of f.
IntervalFunction primitive_of(const Settings& s, const Box& box, const PointFunction& f, const IntervalFunction& G,
                              int depth) {
    if (!s.F.empty()) return IntervalFunction::corner(parse_function(s.F, "--F"), box.dim());
    return indefinite_hk(f, G, box, depth, s.tol.value_or(1e-9), s.budget);
}

SuperadditiveFn parse_control(const std::string& text) {
    if (text.empty() || text == "volume") return SuperadditiveFn::volume_power(1.0);
    try {
        return SuperadditiveFn::volume_power(std::stod(text));
    } catch (const std::exception&) {
        throw UsageError(fmt::format("--phi '{}': expected 'volume' or an exponent p for |Q|^p", text));
    }
}

}  // namespace

Outcome run_verify_mc(const Settings& s) {
    const Box box = parse_box(s.box, "[-1,1]");
    if (box.dim() != 1) throw UsageError("verify-mc works on a 1-D --box");
    const Primitive1D F = closed_form_primitive(parse_function(s.F, "--F"));
    const PointFunction f = parse_function(s.f, "--f");
    const ControlFunction1D phi = ControlFunction1D::from_point_function(parse_function(s.phi.empty() ? "x" : s.phi, "--phi"));
    McOptions opts;
    opts.tol = s.tol.value_or(1e-3);
    const McVerdict v = verify_mc(F, f, phi, {box.lo(0).to_double(), box.hi(0).to_double()}, sample_points(s, box), opts);
    Outcome out;
    out.csv = v.to_csv();
    out.json = nlohmann::json::parse(v.to_json());
    out.pass = v.pass;
    for (const auto& p : v.points)
        if (!p.pass)
            out.message += fmt::format("x = {}: witness y = {}, q = {} ({})\n", format_double(p.x),
                                       format_double(p.witness_y), format_double(p.witness_q), p.reason);
    return out;
}

Outcome run_convert_gauge(const Settings& s) {
    const Box box = parse_box(s.box);
    const PointFunction f = parse_function(s.f, "--f");
    const IntervalFunction G = parse_measure(s.G, box.dim());
    const int depth = s.depth.value_or(8);
    const int resolution = s.resolution.value_or(std::min(depth, 4));
    const IntervalFunction F = primitive_of(s, box, f, G, depth);
    const SuperadditiveFn Phi = parse_control(s.phi);
    const Gauge delta = gauge_from_control(F, f, G, Phi, s.eps, box, depth, resolution);

    const double target = F(box), bound = s.eps * Phi(box);
    Outcome out;
    out.csv = "partition,cells,riemann_sum,defect,pass\n";
    auto rows = nlohmann::json::array();
    auto record = [&](const std::string& name, const TaggedPartition& p) {
        const double sum = riemann_sum(f, G, p);
        const double defect = std::abs(sum - target);
        const bool ok = defect < bound;
        out.pass = out.pass && ok;
        out.csv += fmt::format("{},{},{},{},{}\n", name, p.cells.size(), format_double(sum), format_double(defect),
                               ok ? "true" : "false");
        rows.push_back({{"partition", name}, {"cells", p.cells.size()}, {"riemann_sum", sum}, {"defect", defect},
                        {"pass", ok}});
    };
    record("cousin", cousin_partition(box, delta));
    for (int i = 0; i < s.partitions; ++i)
        record(fmt::format("random{}", i), random_fine_partition(box, delta, s.seed + static_cast<std::uint64_t>(i)));

    auto samples = nlohmann::json::array();
    for (const auto& cell : dyadic_cells(box.dim(), resolution)) {
        const Point c = cell.to_box(box).center();
        samples.push_back({{"x", c}, {"delta", delta(c)}});
    }
    out.json = {{"bound", bound}, {"integral", target}, {"partitions", rows}, {"gauge", samples}};
    if (!out.pass) out.message = fmt::format("some partition misses the bound {}", format_double(bound));
    return out;
}

Outcome run_convert_control(const Settings& s) {
    const Box box = parse_box(s.box);
    const PointFunction f = parse_function(s.f, "--f");
    const IntervalFunction G = parse_measure(s.G, box.dim());
    const int depth = s.depth.value_or(10);
    const IntervalFunction F = primitive_of(s, box, f, G, depth);
    const BoxTagFunction psi = [&](const Box& q, std::span<const double> x) { return F(q) - f(x) * G(q); };

    const int K = s.K.value_or(6);
    std::vector<Gauge> gauges;
    for (int k = 1; k <= K; ++k) {
        auto g = find_certified_gauge(psi, box, k, depth);
        if (!g) {
            Outcome out;
            out.pass = false;
            out.message = fmt::format("no certified gauge for k = {} down to depth {}", k, depth);
            out.json = {{"error", out.message}};
            return out;
        }
        gauges.push_back(*g);
    }
    const SuperadditiveFn Phi = control_from_gauges(psi, gauges, box, depth);
    double min_value = std::numeric_limits<double>::infinity();
    Outcome out;
    out.csv = "cell,phi\n";
    for (const auto& [cell, value] : *Phi.entries()) {
        min_value = std::min(min_value, value);
        out.csv += fmt::format("{},{}\n", csv_escape(cell.str()), format_double(value));
    }
    const double defect = superadditivity_defect(Phi);
    std::vector<Point> pts;
    if (box.dim() == 1) {
        for (double x : sample_points(s, box)) pts.push_back({x});
    } else {
        for (const auto& cell : dyadic_cells(box.dim(), 2)) pts.push_back(cell.to_box(box).center());
    }
    const McNdVerdict v = verify_mc_nd(F, f, G, Phi, box, pts, std::max(1, depth - 4), depth, 1e-3);
    out.pass = min_value > 0.0 && defect <= 1e-12 && v.pass;
    out.json = {{"min_phi", min_value}, {"superadditivity_defect", defect}, {"verify_pass", v.pass},
                {"gauges", K}, {"depth", depth}};
    if (!out.pass)
        out.message = fmt::format("min phi {}, superadditivity defect {}, verifier {}", format_double(min_value),
                                  format_double(defect), v.pass ? "pass" : "fail");
    return out;
}

}  // namespace gaugecalc
