#include "gauge/report.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace gauge {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::random_device rd;
    auto tmp = path;
    tmp += fmt::format(".tmp{:08x}", rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error(fmt::format("write to {} failed", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error(fmt::format("cannot replace {}", path.string()));
    }
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace gauge
