#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gauge/calculus.hpp"

namespace gaugecalc {

/// Bad flags, config or expressions: exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat experiment settings shared by all subcommands. Unset optionals take
/// the per-command defaults.
struct Settings {
    std::string f, F, g, G, phi, fk, preset, out;
    std::string box;
    std::string format = "csv";
    std::optional<double> tol;
    double eps = 0.01;
    double delta = std::numeric_limits<double>::infinity();
    std::uint64_t budget = gauge::kDefaultEvaluationBudget;
    std::optional<int> depth;
    std::optional<int> resolution;
    std::uint64_t seed = 0;
    std::vector<double> at;
    int samples = 33;
    std::optional<int> K;
    int partitions = 100;
    std::optional<int> base;
};

/// What a command produced; `pass` selects exit status 0 or 1.
struct Outcome {
    std::string csv;
    nlohmann::json json;
    bool pass = true;
    std::string message;
};

/// Reads a JSON object of flag values. Parse errors name the file and line.
nlohmann::json load_config(const std::filesystem::path& path);

gauge::PointFunction parse_function(const std::string& text, const char* flag);
/// Parses --box, or `fallback` when the flag was not given.
gauge::Box parse_box(const std::string& text, const char* fallback = "[0,1]");
/// Corner-generated G from a generator expression, or the volume when empty.
gauge::IntervalFunction parse_measure(const std::string& text, std::size_t dim);
/// Samples: --at values when given, else --samples Chebyshev points of the box.
std::vector<double> sample_points(const Settings& s, const gauge::Box& box);

Outcome run_integrate(const Settings& s);
Outcome run_indefinite(const Settings& s);
Outcome run_variation(const Settings& s);
Outcome run_verify_mc(const Settings& s);
Outcome run_convert_gauge(const Settings& s);
Outcome run_convert_control(const Settings& s);
Outcome run_identity(const std::string& kind, Settings s);
Outcome run_mct(const Settings& s);

}  // namespace gaugecalc
