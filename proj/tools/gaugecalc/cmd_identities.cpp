#include <cmath>
#include <map>

#include <fmt/format.h>

#include "gauge/report.hpp"
#include "settings.hpp"

namespace gaugecalc {

using namespace gauge;

namespace {

struct Preset {
    std::string f, F, g, G, box;
    std::vector<double> at;
    std::optional<double> tol;
    std::string fk;
};

const std::map<std::string, std::map<std::string, Preset>>& presets() {
    static const std::map<std::string, std::map<std::string, Preset>> table{
        {"parts",
         {{"sin-x", {"cos(x)", "sin(x)", "1", "x", "[0,1]", {}, {}, {}}},
          {"ones", {"1", "x", "1", "x", "[0,1]", {}, {}, {}}},
          {"zero", {"0", "0", "0", "0", "[0,1]", {}, {}, {}}}}},
        {"change",
         {{"square", {"2*x", "x^2", "1", "", "[0,1]", {}, {}, {}}},
          {"sqrt", {"2*x", "x^2", "sqrt(x)", "", "[0,1]", {}, {}, {}}},
          {"exp", {"exp(x)", "exp(x)", "1/x", "", "[0,1]", {}, {}, {}}}}},
        {"additivity",
         {{"one", {"1", "", "", "", "[0,2]", {1.0}, {}, {}}},
          {"inv-sqrt", {"inv_sqrt", "", "", "", "[0,1]", {0.25}, 1e-3, {}}},
          {"hk", {"hk_derivative", "", "", "", "[0,1]", {0.5}, 1e-3, {}}}}},
        {"monotone",
         {{"2x", {"2*x", "", "", "", "[0,1]", {}, {}, {}}},
          {"cos", {"cos(x)", "", "", "", "[0,3]", {}, {}, {}}},
          {"inv-sqrt", {"inv_sqrt", "", "", "", "[0,1]", {}, {}, {}}}}},
        {"constancy", {{"2x", {"2*x", "", "", "", "[0,1]", {}, {}, {}}}}},
        {"mct",
         {{"min-inv-sqrt", {"inv_sqrt", "2*sqrt(x)", "", "", "[0,1]", {}, 1e-3, "min({k},1/sqrt(x))"}},
          {"constant-k", {"1", "", "", "", "[0,1]", {}, 1e-3, "{k}"}},
          {"x", {"x", "x^2/2", "", "", "[0,1]", {}, 1e-3, "x"}}}},
    };
    return table;
}

// Preset values fill only the settings the user left empty.
Settings with_preset(const std::string& kind, Settings s) {
    if (s.preset.empty()) return s;
    const auto& group = presets().at(kind);
    const auto it = group.find(s.preset);
    if (it == group.end()) {
        std::string names;
        for (const auto& [name, _] : group) names += (names.empty() ? "" : ", ") + name;
        throw UsageError(fmt::format("unknown preset '{}' for {} (known: {})", s.preset, kind, names));
    }
    const Preset& p = it->second;
    auto fill = [](std::string& dst, const std::string& src) {
        if (dst.empty()) dst = src;
    };
    fill(s.f, p.f);
    fill(s.F, p.F);
    fill(s.g, p.g);
    fill(s.G, p.G);
    fill(s.box, p.box);
    fill(s.fk, p.fk);
    if (s.at.empty()) s.at = p.at;
    if (!s.tol) s.tol = p.tol;
    return s;
}

Outcome from_report(const IdentityReport& r) {
    Outcome out;
    out.csv = IdentityReport::csv_header() + "\n" + r.csv_row() + "\n";
    out.json = nlohmann::json::parse(r.to_json());
    out.pass = r.pass;
    if (!r.pass) {
        const auto w = r.inputs.find("witness");
        out.message = w != r.inputs.end() ? "not strictly increasing: " + w->second
                                          : fmt::format("residual {} exceeds {}", format_double(r.residual),
                                                        format_double(r.tolerance));
    }
    return out;
}

std::pair<Rational, Rational> endpoints(const Box& box) {
    if (box.dim() != 1) throw UsageError("identities work on a 1-D --box");
    return {box.lo(0), box.hi(0)};
}

// The table tolerance only has to keep cell signs right; tighter shares starve
// singular leaves such as the one at 0 for inv_sqrt.
Outcome monotone(const Settings& s) {
    const Box box = parse_box(s.box);
    const PointFunction f = parse_function(s.f, "--f");
    const IntervalFunction table =
        indefinite_hk(f, IntervalFunction::volume(box.dim()), box, s.depth.value_or(6), 1e-4, s.budget);
    std::vector<Point> pts;
    for (double x : sample_points(s, box)) pts.push_back({x});
    const MonotoneVerdict v = check_monotone(table, f, pts, s.tol.value_or(1e-10));
    Outcome out;
    out.csv = fmt::format("precondition_ok,min_cell,pass\n{},{},{}\n", v.precondition_ok ? "true" : "false",
                          format_double(v.min_cell), v.pass ? "true" : "false");
    out.json = {{"precondition_ok", v.precondition_ok}, {"min_cell", v.min_cell}, {"pass", v.pass}};
    if (v.worst_cell) out.json["worst_cell"] = v.worst_cell->str();
    out.pass = v.pass;
    if (v.negative_sample) {
        out.json["negative_sample"] = *v.negative_sample;
        out.message = fmt::format("precondition fails: f({}) < 0", format_double((*v.negative_sample)[0]));
    } else if (!v.pass) {
        out.message = fmt::format("cell {} has value {}", v.worst_cell->str(), format_double(v.min_cell));
    }
    return out;
}

Outcome constancy(const Settings& s) {
    const Box box = parse_box(s.box);
    if (box.dim() != 1) throw UsageError("constancy works on a 1-D --box");
    const PointFunction f = parse_function(s.f, "--f");
    const int depth = s.depth.value_or(6);
    const IntervalFunction table = indefinite_hk(f, IntervalFunction::volume(1), box, depth, 1e-10, s.budget);
    const auto nodes0 = primitive_nodes(table, 0);
    const std::size_t base = static_cast<std::size_t>(s.base.value_or(1 << std::max(0, depth - 1)));
    if (base >= nodes0.size()) throw UsageError(fmt::format("--base must be below {}", nodes0.size()));
    const auto nodes1 = primitive_nodes(table, base);
    std::map<double, double> F1, F2;
    std::vector<double> xs;
    for (std::size_t i = 0; i < nodes0.size(); ++i) {
        xs.push_back(nodes0[i].first);
        F1[nodes0[i].first] = nodes0[i].second;
        F2[nodes1[i].first] = nodes1[i].second;
    }
    std::function<double(double)> second = [&](double x) { return F2.at(x); };
    if (!s.F.empty()) {
        const PointFunction closed = parse_function(s.F, "--F");
        second = [closed](double x) { return closed(x); };
    }
    const ConstancyReport r = constancy_check([&](double x) { return F1.at(x); }, second, xs, s.tol.value_or(1e-6));
    Outcome out;
    out.csv = fmt::format("constant,deviation,pass\n{},{},{}\n", format_double(r.constant), format_double(r.deviation),
                          r.pass ? "true" : "false");
    out.json = {{"constant", r.constant}, {"deviation", r.deviation}, {"pass", r.pass}};
    out.pass = r.pass;
    if (!r.pass) out.message = fmt::format("deviation {} from a constant", format_double(r.deviation));
    return out;
}

}  // namespace

Outcome run_identity(const std::string& kind, Settings s) {
    s = with_preset(kind, std::move(s));
    if (kind == "monotone") return monotone(s);
    if (kind == "constancy") return constancy(s);
    const Box box = parse_box(s.box);
    const auto [a, b] = endpoints(box);
    const double tol = s.tol.value_or(1e-6);
    if (kind == "parts")
        return from_report(check_parts(parse_function(s.f, "--f"), parse_function(s.F, "--F"),
                                       parse_function(s.g, "--g"), parse_function(s.G, "--G"), a, b, tol));
    if (kind == "change")
        return from_report(check_change_of_variables(parse_function(s.F, "--F"), parse_function(s.f, "--f"),
                                                     parse_function(s.g, "--g"), a, b, tol));
    if (s.at.size() != 1) throw UsageError("additivity needs the split point as a single --at value");
    const Rational mid = Rational::from_double(s.at[0]);
    if (!(a < mid && mid < b)) throw UsageError("the split point must lie inside --box");
    return from_report(check_interval_additivity(parse_function(s.f, "--f"), a, mid, b, tol));
}

Outcome run_mct(const Settings& settings) {
    const Settings s = with_preset("mct", settings);
    if (s.fk.empty()) throw UsageError("--fk is required (use {k} for the index)");
    auto make = [text = s.fk](int k) {
        std::string t = text;
        for (std::size_t pos; (pos = t.find("{k}")) != std::string::npos;) t.replace(pos, 3, std::to_string(k));
        return PointFunction::parse(t);
    };
    try {
        (void)make(1);
    } catch (const ParseError& e) {
        throw UsageError(fmt::format("--fk '{}': column {}: {}", s.fk, e.column(), e.what()));
    }
    const Box box = parse_box(s.box);
    const auto [a, b] = endpoints(box);
    std::optional<Primitive1D> F;
    if (!s.F.empty()) F = closed_form_primitive(parse_function(s.F, "--F"));
    const MctReport rep = mct_experiment(make, parse_function(s.f, "--f"), a, b, s.K.value_or(64), s.tol.value_or(1e-3), F);
    Outcome out;
    out.csv = rep.to_csv();
    out.json = nlohmann::json::parse(rep.to_json());
    out.pass = rep.converged && rep.control_verdict && rep.control_verdict->pass;
    if (!out.pass) out.message = rep.diagnostic.empty() ? "the series control fails the verifier" : rep.diagnostic;
    return out;
}

}  // namespace gaugecalc
