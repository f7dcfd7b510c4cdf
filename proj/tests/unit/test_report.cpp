#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "gauge/report.hpp"

namespace gauge {
namespace {

double parse(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

TEST(FormatDouble, RoundTrips) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(parse(format_double(v)), v);
    }
    EXPECT_EQ(parse(format_double(std::numeric_limits<double>::denorm_min())),
              std::numeric_limits<double>::denorm_min());
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(CsvEscape, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(WriteFileAtomic, ReplacesContentAndLeavesNoTemporaries) {
    const auto dir = std::filesystem::temp_directory_path() / "gauge_report_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.csv";
    write_file_atomic(path, "first\n");
    EXPECT_EQ(slurp(path), "first\n");
    write_file_atomic(path, "second\n");
    EXPECT_EQ(slurp(path), "second\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 1u);
    std::filesystem::remove_all(dir);
}

TEST(WriteFileAtomic, MissingDirectoryThrows) {
    const auto path = std::filesystem::temp_directory_path() / "gauge_no_such_dir" / "x" / "out.csv";
    EXPECT_ANY_THROW(write_file_atomic(path, "x"));
}

}  // namespace
}  // namespace gauge
