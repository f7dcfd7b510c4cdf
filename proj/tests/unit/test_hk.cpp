#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gauge/hk.hpp"
#include "gauge/parallel.hpp"

namespace gauge {
namespace {

Rational R(const char* text) { return Rational::parse(text); }
Box I(const char* lo, const char* hi) { return Box::interval(R(lo), R(hi)); }
PointFunction P(const char* text) { return PointFunction::parse(text); }
const IntervalFunction kLength = IntervalFunction::volume(1);

TaggedPartition halves(double left_tag, double right_tag) {
    return {I("0", "1"), {{I("0", "1/2"), {left_tag}}, {I("1/2", "1"), {right_tag}}}};
}

// Composite midpoint rule with n cells: an independent oracle for smooth integrands.
double midpoint(const PointFunction& f, double a, double b, int n) {
    double s = 0.0;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

TEST(RiemannSum, HandExamples) {
    EXPECT_DOUBLE_EQ(riemann_sum(P("1"), kLength, cousin_partition(I("0", "1"), Gauge::constant(0.1))), 1.0);
    EXPECT_DOUBLE_EQ(riemann_sum(P("x"), kLength, halves(0.0, 0.5)), 0.25);
    EXPECT_DOUBLE_EQ(riemann_sum(P("x"), kLength, halves(0.25, 0.75)), 0.5);
}

TEST(RiemannSum, RejectsTagOutsideCellAndNamesFailingTag) {
    EXPECT_THROW((void)riemann_sum(P("x"), kLength, halves(0.75, 0.75)), std::invalid_argument);
    try {
        (void)riemann_sum(P("log(x - 1/2)"), kLength, halves(0.25, 0.75));
        FAIL() << "expected an evaluation error";
    } catch (const EvalError& e) {
        EXPECT_NE(std::string(e.what()).find("0.25"), std::string::npos);
    }
}

TEST(RiemannSum, AdditiveTableTelescopes) {
    const Box unit = I("0", "1");
    const IntervalFunction table = indefinite_hk(P("exp(x)"), kLength, unit, 5, 1e-12);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_fine_partition(unit, Gauge::constant(0.3), rng(), {0.5, 0, 5});
        double sum = 0.0;
        for (const auto& c : p.cells) sum += table(c.cell);
        EXPECT_NEAR(sum, table(unit), 1e-12);
    }
}

TEST(Integrate, LinearIsExact) {
    const auto r = hk_integrate(P("2*x"), kLength, I("0", "1"), 1e-9);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Integrate, StieltjesJumpAtHalf) {
    const auto G = IntervalFunction::corner(P("heaviside_1/2"), 1);
    const auto r = hk_integrate(P("x"), G, I("0", "1"), 1e-9);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 0.5, 1e-9);
}

TEST(Integrate, SingularAndOscillatingIntegrands) {
    const auto a = hk_integrate(P("inv_sqrt"), kLength, I("0", "1"), 1e-4);
    EXPECT_TRUE(a.converged);
    EXPECT_NEAR(a.value, 2.0, 1e-4);
    const auto b = hk_integrate(P("hk_derivative"), kLength, I("0", "1/2"), 1e-4);
    EXPECT_TRUE(b.converged);
    EXPECT_NEAR(b.value, P("hk_primitive")(0.5), 1e-4);
}

TEST(Integrate, TwoDimensionalPolynomial) {
    const auto r = hk_integrate(P("x1*x2^2 + 1"), IntervalFunction::volume(2), Box::parse("[0,1]x[0,2]"), 1e-10);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 1.0 / 2 * 8.0 / 3 + 2.0, 1e-10);
}

TEST(Integrate, AgreesWithMidpointOracle) {
    for (const char* text : {"exp(x)*cos(3*x)", "1/(1+x^2)", "sqrt(1+x)*sin(x)"}) {
        const PointFunction f = P(text);
        const auto r = hk_integrate(f, kLength, I("0", "2"), 1e-8);
        EXPECT_TRUE(r.converged) << text;
        EXPECT_NEAR(r.value, midpoint(f, 0.0, 2.0, 200000), 1e-8) << text;
    }
}

TEST(Integrate, ConvergedImpliesEstimateBelowTolerance) {
    for (const char* text : {"x^7", "abs(x - 1/3)", "inv_sqrt", "sin(20*x)"}) {
        for (double tol : {1e-3, 1e-6}) {
            const auto r = hk_integrate(P(text), kLength, I("0", "1"), tol);
            if (r.converged) {
                EXPECT_LE(r.error_estimate, tol) << text;
            }
        }
    }
}

TEST(Integrate, SelfConsistentUnderTighterTolerance) {
    for (const char* text : {"abs(x - 1/3)", "inv_sqrt", "sin(20*x)", "hk_derivative"}) {
        const double t = 1e-3;
        const auto coarse = hk_integrate(P(text), kLength, I("0", "1"), t);
        const auto fine = hk_integrate(P(text), kLength, I("0", "1"), t / 10);
        EXPECT_LE(std::abs(coarse.value - fine.value), 1.1 * t) << text;
    }
}

TEST(Integrate, BudgetExhaustionIsReported) {
    IntegrateOptions opts;
    opts.budget = 200;
    const auto r = hk_integrate(P("hk_derivative"), kLength, I("0", "1"), 1e-8, opts);
    EXPECT_FALSE(r.converged);
    EXPECT_FALSE(r.worst_cells.empty());
}

TEST(Integrate, RejectsBadArguments) {
    EXPECT_THROW((void)hk_integrate(P("x"), kLength, I("0", "1"), 0.0), std::invalid_argument);
    const auto table = IntervalFunction::table(I("0", "1"), 0, {{I("0", "1"), 1.0}}, 0.0);
    EXPECT_THROW((void)hk_integrate(P("x"), table, I("0", "1"), 1e-6), std::invalid_argument);
    EXPECT_THROW((void)hk_integrate(P("log(x - 2)"), kLength, I("0", "1"), 1e-6), EvalError);
}

TEST(Indefinite, HandExamples) {
    const auto ones = indefinite_hk(P("1"), kLength, I("0", "1"), 1, 1e-12);
    EXPECT_DOUBLE_EQ(ones(I("0", "1/2")), 0.5);
    EXPECT_DOUBLE_EQ(ones(I("1/2", "1")), 0.5);
    EXPECT_DOUBLE_EQ(ones(I("0", "1")), 1.0);
    const auto lin = indefinite_hk(P("2*x"), kLength, I("0", "1"), 1, 1e-12);
    EXPECT_NEAR(lin(I("0", "1/2")), 0.25, 1e-14);
    EXPECT_NEAR(lin(I("1/2", "1")), 0.75, 1e-14);
    EXPECT_NEAR(indefinite_hk(P("inv_sqrt"), kLength, I("0", "1"), 0, 1e-4)(I("0", "1")), 2.0, 1e-4);
}

TEST(Indefinite, ParentsAreSumsOfChildren) {
    const Box root = Box::parse("[0,1]x[0,1]");
    const auto t = indefinite_hk(P("exp(x1)*x2"), IntervalFunction::volume(2), root, 3, 1e-10);
    for (const auto& [box, value] : t.entries()) {
        if (box.side(0) == R("1/8")) continue;
        double sum = 0.0;
        for (const auto& child : box.bisect()) sum += t(child);
        EXPECT_NEAR(value, sum, 1e-14) << box.str();
    }
}

TEST(Indefinite, CsvLayoutAndDepthLimit) {
    const auto t = indefinite_hk(P("1"), kLength, I("0", "1"), 1, 1e-12);
    EXPECT_EQ(indefinite_csv(t), "depth,lo1,hi1,value\n0,0,1,1\n1,0,0.5,0.5\n1,0.5,1,0.5\n");
    EXPECT_THROW((void)indefinite_hk(P("1"), kLength, I("0", "1"), 25, 1e-6), std::invalid_argument);
}

TEST(Indefinite, IdenticalAcrossThreadCounts) {
    auto run = [](int threads, const char* f, int depth, double tol) {
        ScopedThreadCount scope(threads);
        return indefinite_csv(indefinite_hk(P(f), kLength, I("0", "1"), depth, tol));
    };
    EXPECT_EQ(run(1, "inv_sqrt", 4, 1e-3), run(4, "inv_sqrt", 4, 1e-3));
    EXPECT_EQ(run(1, "sin(20*x)", 6, 1e-8), run(4, "sin(20*x)", 6, 1e-8));
}

BoxTagFunction volume_power(double c, double p) {
    return [=](const Box& q, std::span<const double>) { return c * std::pow(q.volume(), p); };
}

TEST(Variation, HandExamples) {
    const Box unit = I("0", "1");
    const Gauge inf = Gauge::constant(std::numeric_limits<double>::infinity());
    const BoxTagFunction zero = [](const Box&, std::span<const double>) { return 0.0; };
    EXPECT_EQ(delta_variation_bruteforce(zero, unit, inf, dyadic_grid(unit, 2)), 0.0);
    EXPECT_EQ(delta_variation_dp(zero, unit, inf, 3), 0.0);
    EXPECT_DOUBLE_EQ(*delta_variation_bruteforce(volume_power(1, 1), unit, inf, dyadic_grid(unit, 3)), 1.0);
    const std::vector<Rational> grid{R("0"), R("1/2"), R("1")};
    EXPECT_DOUBLE_EQ(*delta_variation_bruteforce(volume_power(1, 2), unit, inf, grid), 1.0);
    EXPECT_DOUBLE_EQ(*delta_variation_dp(volume_power(1, 2), unit, inf, 3), 1.0);
}

TEST(Variation, InfeasibleGaugeIsExplicit) {
    const Box unit = I("0", "1");
    EXPECT_FALSE(delta_variation_dp(volume_power(1, 1), unit, Gauge::constant(0.01), 3).has_value());
    EXPECT_FALSE(delta_variation_bruteforce(volume_power(1, 1), unit, Gauge::constant(0.01), dyadic_grid(unit, 2)));
}

TEST(Variation, MonotoneInTheGauge) {
    const Box unit = I("0", "1");
    const BoxTagFunction psi = [](const Box& q, std::span<const double> x) {
        return std::sin(7 * x[0]) * q.volume() + q.volume() * q.volume();
    };
    double previous = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 5; ++j) {
        const auto v = delta_variation_dp(psi, unit, Gauge::constant(std::ldexp(1.5, -j)), 6);
        ASSERT_TRUE(v.has_value());
        EXPECT_LE(*v, previous + 1e-15) << j;
        previous = *v;
    }
}

TEST(Variation, DpTableIsSuperadditive) {
    const Box root = Box::parse("[0,1]x[0,1]");
    const BoxTagFunction psi = [](const Box& q, std::span<const double> x) { return (x[0] - x[1]) * q.volume(); };
    const auto table = delta_variation_table(psi, root, Gauge::constant(0.4), 4);
    for (const auto& [box, value] : table) {
        if (box.side(0) == R("1/16")) continue;
        double sum = 0.0;
        for (const auto& child : box.bisect()) sum += table.at(child);
        EXPECT_GE(value, sum - 1e-15) << box.str();
    }
}

}  // namespace
}  // namespace gauge
