#include "settings.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace gaugecalc {

nlohmann::json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("{}: cannot open config", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw UsageError(fmt::format("{}:{}: invalid JSON ({})", path.string(), line, e.what()));
    }
    if (!j.is_object()) throw UsageError(fmt::format("{}:1: config must be a JSON object", path.string()));
    return j;
}

gauge::PointFunction parse_function(const std::string& text, const char* flag) {
    if (text.empty()) throw UsageError(fmt::format("{} is required", flag));
    try {
        return gauge::PointFunction::parse(text);
    } catch (const gauge::ParseError& e) {
        throw UsageError(fmt::format("{} '{}': column {}: {}", flag, text, e.column(), e.what()));
    }
}

gauge::Box parse_box(const std::string& text, const char* fallback) {
    try {
        return gauge::Box::parse(text.empty() ? std::string(fallback) : text);
    } catch (const std::exception& e) {
        throw UsageError(fmt::format("--box '{}': {}", text, e.what()));
    }
}

gauge::IntervalFunction parse_measure(const std::string& text, std::size_t dim) {
    if (text.empty() || text == "volume") return gauge::IntervalFunction::volume(dim);
    return gauge::IntervalFunction::corner(parse_function(text, "--G"), dim);
}

std::vector<double> sample_points(const Settings& s, const gauge::Box& box) {
    if (!s.at.empty()) return s.at;
    if (s.samples < 1) throw UsageError("--samples must be positive");
    return gauge::chebyshev_points(box.lo(0).to_double(), box.hi(0).to_double(), static_cast<std::size_t>(s.samples));
}

}  // namespace gaugecalc
