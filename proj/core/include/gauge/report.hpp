#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gauge {

/// Seventeen significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a half-written report.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace gauge
