#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gauge/hk.hpp"
#include "gauge/mc.hpp"

namespace gauge {

/// Outcome of one executable identity: pass iff residual <= tolerance.
struct IdentityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, std::string> inputs;

    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] static std::string csv_header();
    [[nodiscard]] std::string csv_row() const;
};

/// int_a^b f G  versus  [F G]_a^b - int_a^b F g, with the bracket taken from
/// one-sided limits. Each integral runs at tol/10.
IdentityReport check_parts(const PointFunction& f, const PointFunction& F, const PointFunction& g,
                           const PointFunction& G, const Rational& a, const Rational& b, double tol);

/// int_{F(a+)}^{F(b-)} g  versus  int_a^b g(F(x)) f(x) dx. A non-increasing
/// pair of F on 257 samples fails the report and is echoed as "witness".
IdentityReport check_change_of_variables(const PointFunction& F, const PointFunction& f, const PointFunction& g,
                                         const Rational& a, const Rational& b, double tol);

/// int_a^c f  versus  int_a^b f + int_b^c f. Throws BudgetExceeded when a
/// sub-integral does not converge.
IdentityReport check_interval_additivity(const PointFunction& f, const Rational& a, const Rational& b,
                                         const Rational& c, double tol);

struct MonotoneVerdict {
    bool precondition_ok = false;
    bool pass = false;
    double min_cell = 0.0;
    std::optional<Point> negative_sample;
    std::optional<Box> worst_cell;
};

/// Requires f >= 0 at every sample; passes iff every table cell is >= -tol.
MonotoneVerdict check_monotone(const IntervalFunction& F_table, const PointFunction& f,
                               const std::vector<Point>& sample_points, double tol = 1e-10);

struct ConstancyReport {
    double constant = 0.0;
    double deviation = 0.0;
    bool pass = false;
};

/// Mean of F1 - F2 over the samples and the largest deviation from it.
ConstancyReport constancy_check(const std::function<double(double)>& F1, const std::function<double(double)>& F2,
                                const std::vector<double>& sample_points, double tol = 1e-6);

struct MctOptions {
    double integration_tol = 1e-7;
    std::size_t grid_points = 33;
    McOptions verify;
    int primitive_depth = 8;
};

struct MctReport {
    std::vector<std::pair<int, double>> integrals;
    bool nondecreasing = false;
    bool converged = false;
    bool diverged = false;
    std::optional<double> limit;
    std::optional<double> reference;
    std::string diagnostic;
    std::optional<McVerdict> control_verdict;
    std::vector<int> subsequence;

    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] std::string to_json() const;
};

/// Integrals of f_1..f_K with a tail-Cauchy limit test (three successive
/// terms within tol/2; the limit is the Aitken extrapolation of the terms at
/// K/4, K/2, K), a comparison with the integral of f, and a verify_mc run of
/// the series control on the grid (a + i(b-a)/(n+1)). `F` is the primitive
/// of f; when absent it is built numerically.
MctReport mct_experiment(const std::function<PointFunction(int)>& f_k, const PointFunction& f, const Rational& a,
                         const Rational& b, int K, double tol, const std::optional<Primitive1D>& F = std::nullopt,
                         const MctOptions& options = {});

}  // namespace gauge
