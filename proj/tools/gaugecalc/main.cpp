#include <cstdio>
#include <iostream>
#include <string_view>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gauge/report.hpp"
#include "settings.hpp"

using namespace gaugecalc;

namespace {

// Config keys become option defaults, so explicit flags still win.
void apply_config(CLI::App& app, const nlohmann::json& config, const std::string& path) {
    for (const auto& [key, value] : config.items()) {
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") throw UsageError(fmt::format("{}: unknown key '{}'", path, key));
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_array()) {
            for (const auto& v : value) text += (text.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            text = value.dump();
        }
        opt->default_val(text);
    }
}

std::optional<std::string> config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string_view a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.starts_with("--config=")) return std::string(a.substr(9));
    }
    return std::nullopt;
}

void emit(const Outcome& out, const Settings& s) {
    const std::string body = s.format == "json" ? out.json.dump(2) + "\n" : out.csv;
    if (s.out.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
    } else {
        gauge::write_file_atomic(s.out, body);
    }
    if (!out.message.empty()) std::cerr << out.message << (out.message.ends_with('\n') ? "" : "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauge (Henstock-Kurzweil) integration toolkit"};
    app.require_subcommand(1);
    Settings s;
    std::string config;

    app.add_option("--config", config, "JSON object of flag values; flags given on the command line win");
    app.add_option("--f", s.f, "integrand or derivative (expression or builtin)");
    app.add_option("--F", s.F, "primitive (expression or builtin)");
    app.add_option("--g", s.g, "second derivative-side function");
    app.add_option("--G", s.G, "generator of the interval function G, or 'volume'");
    app.add_option("--phi", s.phi, "control: expression (verify-mc) or 'volume' / exponent p (convert)");
    app.add_option("--fk", s.fk, "sequence term with {k} as the index (mct)");
    app.add_option("--box", s.box, "domain with rational endpoints, e.g. [0,1] or [0,1]x[0,1/2]");
    app.add_option("--tol", s.tol, "tolerance")->check(CLI::PositiveNumber);
    app.add_option("--eps", s.eps, "epsilon of the gauge inequality")->check(CLI::PositiveNumber);
    app.add_option("--delta", s.delta, "constant gauge for variation");
    app.add_option("--budget", s.budget, "evaluation budget");
    app.add_option("--depth", s.depth, "dyadic depth");
    app.add_option("--resolution", s.resolution, "gauge resolution depth (convert gauge)");
    app.add_option("--seed", s.seed, "seed for random fine partitions");
    app.add_option("--at", s.at, "sample points, comma separated")->delimiter(',');
    app.add_option("--samples", s.samples, "number of Chebyshev sample points when --at is absent");
    app.add_option("--K", s.K, "number of terms or gauges");
    app.add_option("--partitions", s.partitions, "random fine partitions checked by convert gauge");
    app.add_option("--base", s.base, "base node index of the second primitive (constancy)");
    app.add_option("--preset", s.preset, "named example inputs for identity and mct");
    app.add_option("--out", s.out, "output file (written atomically); stdout when absent");
    app.add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::function<Outcome()> action;
    auto sub = [&](CLI::App* parent, const char* name, const char* help, std::function<Outcome()> fn) {
        CLI::App* c = parent->add_subcommand(name, help)->fallthrough();
        c->callback([&action, fn] { action = fn; });
        return c;
    };
    sub(&app, "integrate", "adaptive gauge integral of f dG over --box", [&] { return run_integrate(s); });
    sub(&app, "indefinite", "table of integrals over dyadic subcells", [&] { return run_indefinite(s); });
    sub(&app, "verify-mc", "sampled MC-derivative check of (F, f, phi)", [&] { return run_verify_mc(s); });
    sub(&app, "variation", "delta-variation of F(Q) - f(x)G(Q), both algorithms", [&] { return run_variation(s); });
    CLI::App* convert = app.add_subcommand("convert", "control <-> gauge conversions")->fallthrough()->require_subcommand(1);
    sub(convert, "gauge", "gauge from the control Phi", [&] { return run_convert_gauge(s); });
    sub(convert, "control", "control from certified gauges", [&] { return run_convert_control(s); });
    CLI::App* identity = app.add_subcommand("identity", "executable calculus identities")->fallthrough()->require_subcommand(1);
    for (const char* kind : {"parts", "change", "additivity", "monotone", "constancy"})
        sub(identity, kind, "identity check", [&s, k = std::string(kind)] { return run_identity(k, s); });
    sub(&app, "mct", "monotone convergence experiment", [&] { return run_mct(s); });

    try {
        if (auto path = config_path(argc, argv)) apply_config(app, load_config(*path), *path);
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        const Outcome out = action();
        emit(out, s);
        return out.pass ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gauge::ParseError& e) {
        std::cerr << "error: column " << e.column() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return 1;
    }
}
