#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gauge/hk.hpp"
#include "gauge/interval_function.hpp"
#include "gauge/intervals.hpp"
#include "gauge/point_function.hpp"

namespace gauge {

/// A control that is not strictly increasing on some probed pair.
class InvalidControl : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The sequence of integrals in a monotone-convergence construction is unbounded.
class MctDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Jump {
    double at = 0.0;
    double left = 0.0;   // phi(at-)
    double right = 0.0;  // phi(at+)
};

/// Strictly increasing real function on an open interval. `difference(y, x)`
/// is phi(y) - phi(x), evaluated termwise where possible so that close
/// arguments do not cancel.
class ControlFunction1D {
public:
    using Fn = std::function<double(double)>;
    using Difference = std::function<double(double, double)>;

    static ControlFunction1D parse(std::string_view text);
    static ControlFunction1D from_point_function(const PointFunction& phi);
    static ControlFunction1D from_function(Fn value, std::string description, Difference difference = {},
                                           std::vector<Jump> jumps = {});
    /// Piecewise-linear through strictly increasing samples (x, phi(x)).
    static ControlFunction1D table(std::vector<std::pair<double, double>> samples, std::vector<Jump> jumps = {});
    /// The identity x.
    static ControlFunction1D identity();

    double operator()(double x) const { return value_(x); }
    [[nodiscard]] double difference(double y, double x) const { return difference_(y, x); }
    [[nodiscard]] const std::vector<Jump>& jumps() const { return jumps_; }
    [[nodiscard]] const std::string& description() const { return description_; }
    [[nodiscard]] const std::optional<std::string>& expression() const { return expression_; }
    /// Distance from phi(x) to the declared supremum, when one is known.
    [[nodiscard]] std::optional<double> headroom(double x) const;

    /// Expression text or description, declared jumps and samples if table-backed.
    [[nodiscard]] std::string to_json() const;

    ControlFunction1D with_headroom(Fn headroom) const;

private:
    ControlFunction1D() = default;
    Fn value_;
    Difference difference_;
    std::vector<Jump> jumps_;
    std::string description_;
    std::optional<std::string> expression_;
    std::vector<std::pair<double, double>> samples_;
    Fn headroom_;
};

/// Primitive F of a point function with an accurate increment F(y) - F(x).
struct Primitive1D {
    std::function<double(double)> value;
    std::function<double(double, double)> difference;
    std::string description;
};

Primitive1D closed_form_primitive(const PointFunction& F);
/// F(x) = integral of f from a to x: an indefinite table on [a, b] at `depth`
/// plus a direct integral from the nearest node; increments are integrated directly.
Primitive1D numerical_primitive(const PointFunction& f, double a, double b, int depth = 10, double tol = 1e-11);

struct McPointRecord {
    double x = 0.0;
    std::vector<double> h;
    std::vector<double> q;
    bool pass = false;
    /// Probe attaining the quotient at the finest level.
    double witness_y = 0.0;
    double witness_q = 0.0;
    std::string reason;
};

struct McVerdict {
    std::vector<McPointRecord> points;
    bool pass = false;
    double tol = 0.0;

    [[nodiscard]] std::vector<double> failing_points() const;
    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] std::string to_csv() const;
};

/// 2^-3, ..., 2^-16.
std::vector<double> default_h_levels();

struct McOptions {
    std::vector<double> h_levels = default_h_levels();
    int probes_per_level = 32;
    double tol = 1e-3;
};

/// Quotients |F(y) - F(x) - f(x)(y - x)| / |phi(y) - phi(x)| maximised over
/// probes y = x -/+ h 2^(-8j/P), j < P, with |y - x| <= h, one entry per
/// level. Probes outside the open domain (lo, hi) are skipped. Throws
/// InvalidControl when phi does not increase across a probe pair.
McPointRecord mc_defect(const Primitive1D& F, const PointFunction& f, const ControlFunction1D& phi, double x,
                        std::pair<double, double> domain, const McOptions& options = {});

/// Pass iff at every sample q(h_min) <= tol and q at each of the last three
/// levels is at most twice the previous one.
McVerdict verify_mc(const Primitive1D& F, const PointFunction& f, const ControlFunction1D& phi,
                    std::pair<double, double> domain, const std::vector<double>& sample_points,
                    const McOptions& options = {});

/// Chebyshev points cos((2i+1)pi/2n) mapped to (a, b), ascending.
std::vector<double> chebyshev_points(double a, double b, std::size_t n);

/// alpha * phi + beta; alpha must be positive.
ControlFunction1D rescale(const ControlFunction1D& phi, double alpha, double beta);

enum class CombineMode { SumWithIdentity, Compose };

/// SumWithIdentity: phi + psi + x. Compose: psi(F(x)) + phi(x), where F must
/// increase strictly on `samples` probe points of `domain`.
ControlFunction1D combine_controls(CombineMode mode, const ControlFunction1D& phi, const ControlFunction1D& psi,
                                   const std::optional<PointFunction>& F = std::nullopt,
                                   std::optional<std::pair<double, double>> domain = std::nullopt,
                                   std::size_t samples = 257);

struct GluedControl {
    Primitive1D F;
    ControlFunction1D phi;
    double F1_left = 0.0, F2_right = 0.0;
    double phi1_left = 0.0, phi2_right = 0.0;
};

/// Glues (F1, phi1) on (a, b) with (F2, phi2) on (b, c): F_i is shifted by
/// its one-sided limit at b so that F(b) = 0, and phi_i is shifted so that
/// phi(b-) = -1, phi(b) = 0, phi(b+) = 1. Throws LimitDivergence.
GluedControl glue_controls(const Primitive1D& F1, const ControlFunction1D& phi1, const Primitive1D& F2,
                           const ControlFunction1D& phi2, double a, double b, double c);

struct BoundedControl {
    ControlFunction1D phi;
    double tail = 0.0;
};

/// sum_{k<=K} 2^-k psi_k with psi_k = 0 left of a_k, the normalised phi_k on
/// (a_k, b_k) and 1 right of b_k. Values lie in (0, 1). Throws InvalidControl
/// when some phi_k fails to increase on sampled points of (a_k, b_k).
BoundedControl bounded_control(const std::vector<ControlFunction1D>& phis, const std::vector<double>& a,
                               const std::vector<double>& b, int K = 20);

struct MctInput {
    std::function<Primitive1D(int)> F_k;
    std::function<PointFunction(int)> f_k;
    /// Controls with values in (0, 1), e.g. from bounded_control.
    std::function<ControlFunction1D(int)> phi_k;
    Primitive1D F;
    double a = 0.0, b = 1.0;
};

struct MctControl {
    ControlFunction1D phi;
    std::vector<int> subsequence;
    std::vector<double> endpoint_integrals;
    double limit_integral = 0.0;
    double tail_phi = 0.0;
    double tail_F = 0.0;
};

/// phi = sum_j 2^-j phi_{k_j} + sum_j j (F - F_{k_j}) + x over the subsequence
/// k_1 < k_2 < ... <= K with integral_{k_j} > integral - 2^-j (primitives
/// normalised at a+). Checks f_k <= f_{k+1} on `check_points`. Throws
/// MctDivergence when the endpoint integrals grow without bound.
MctControl mct_control(const MctInput& input, int K, const std::vector<double>& check_points);

/// Largest dyadic fraction of diam(domain) such that every tested box
/// containing x (dyadic cells of `domain` down to `depth` and their
/// half-side translates) satisfies |F(Q) - f(x)G(Q)| < eps Phi(Q).
/// Throws std::runtime_error when the finest tested scale already fails.
double gauge_scale_at(const IntervalFunction& F, const PointFunction& f, const IntervalFunction& G,
                      const SuperadditiveFn& Phi, double eps, const Box& domain, const Point& x, int depth);

/// Piecewise constant gauge on the dyadic cells of `domain` at `resolution`:
/// each cell takes the smallest scale over its center and corners; floor 2^-depth diam(domain).
Gauge gauge_from_control(const IntervalFunction& F, const PointFunction& f, const IntervalFunction& G,
                         const SuperadditiveFn& Phi, double eps, const Box& domain, int depth, int resolution);

/// Tries delta = 1.5 * 2^-j diam(domain) for j = 0..depth and returns the
/// first whose DP variation over the domain is at most 2^-k.
std::optional<Gauge> find_certified_gauge(const BoxTagFunction& psi, const Box& domain, int k, int depth);

/// Phi(Q) = |Q| + sum_{k=1..K} k V_k(Q) as a table on the dyadic cells of
/// `domain` down to `depth`, where V_k is the DP delta_k-variation of psi.
/// Throws std::invalid_argument when V_k(domain) > 2^-k for some k.
SuperadditiveFn control_from_gauges(const BoxTagFunction& psi, const std::vector<Gauge>& gauges, const Box& domain,
                                    int depth);

struct McNdRecord {
    Point x;
    std::vector<double> q;  // one per depth
    bool pass = false;
};

struct McNdVerdict {
    std::vector<McNdRecord> points;
    bool pass = false;
};

/// n-D verifier: q(d) = max over dyadic cells Q of `domain` at depths
/// d..max_depth that contain x of |F(Q) - f(x)G(Q)| / Phi(Q); pass rule as verify_mc.
McNdVerdict verify_mc_nd(const IntervalFunction& F, const PointFunction& f, const IntervalFunction& G,
                         const SuperadditiveFn& Phi, const Box& domain, const std::vector<Point>& sample_points,
                         int min_depth, int max_depth, double tol = 1e-3);

/// Largest violation of Phi(Q) >= sum Phi(children) over a table's cells (<= 0 when superadditive).
double superadditivity_defect(const SuperadditiveFn& Phi);

}  // namespace gauge
