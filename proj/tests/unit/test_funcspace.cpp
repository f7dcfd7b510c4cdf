#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "gauge/interval_function.hpp"
#include "gauge/intervals.hpp"
#include "gauge/point_function.hpp"

namespace gauge {
namespace {

Rational R(const char* text) { return Rational::parse(text); }
Box I(const char* lo, const char* hi) { return Box::interval(R(lo), R(hi)); }

TEST(Parse, AcceptsGrammarExamples) {
    EXPECT_NO_THROW(Expr::parse("x^2*sin(1/x^2)"));
    EXPECT_NO_THROW(Expr::parse("ite(x<1/2, 0, 1)"));
    EXPECT_DOUBLE_EQ(Expr::parse("ite(x<1/2, 0, 1)").eval(0.25), 0.0);
    EXPECT_DOUBLE_EQ(Expr::parse("ite(x<1/2, 0, 1)").eval(0.5), 1.0);
}

TEST(Parse, RejectsImplicitMultiplicationAtColumnTwo) {
    try {
        (void)Expr::parse("2x");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.column(), 2U);
    }
}

TEST(Parse, RejectsUnknownNamesAndArity) {
    EXPECT_THROW((void)Expr::parse("foo(x)"), ParseError);
    EXPECT_THROW((void)Expr::parse("sin(x, x)"), ParseError);
    EXPECT_THROW((void)Expr::parse("min(x)"), ParseError);
    EXPECT_THROW((void)Expr::parse("(x"), ParseError);
}

TEST(Parse, RationalLiteralsAndExponents) {
    EXPECT_DOUBLE_EQ(Expr::parse("1/3").eval(0.0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(Expr::parse("x^2/2").eval(3.0), 4.5);
    EXPECT_DOUBLE_EQ(Expr::parse("x^(1/2)").eval(4.0), 2.0);
    EXPECT_DOUBLE_EQ(Expr::parse("-x^2").eval(3.0), -9.0);
}

TEST(Parse, CanonicalFormIsIdempotent) {
    for (const char* text : {"x^2*sin(1/x^2)", "ite(x<-1/2, x, 1-x)", "min(x1, x2) + max(abs(x), 3/4)",
                             "exp(-x)*log(2+x)/sqrt(1+x^2)", "-(x-1)^3", "2.5e-3*x"}) {
        const Expr e = Expr::parse(text);
        const std::string once = e.str();
        EXPECT_EQ(Expr::parse(once).str(), once) << text;
        for (double x : {0.1, 0.7, 1.3}) {
            const std::vector<double> pt{x, 0.4};
            EXPECT_DOUBLE_EQ(Expr::parse(once).eval(pt), e.eval(pt)) << text;
        }
    }
}

TEST(Eval, DomainErrorsNameTheSubexpression) {
    try {
        (void)Expr::parse("1 + log(x - 2)").eval(1.0);
        FAIL() << "expected an evaluation error";
    } catch (const EvalError& e) {
        EXPECT_NE(e.subexpression().find("log"), std::string::npos);
    }
    EXPECT_THROW((void)Expr::parse("sqrt(x)").eval(-1.0), EvalError);
    EXPECT_THROW((void)Expr::parse("1/x").eval(0.0), EvalError);
}

TEST(Builtins, DeclaredValues) {
    EXPECT_EQ(PointFunction::parse("hk_derivative")(0.0), 0.0);
    EXPECT_NEAR(PointFunction::parse("hk_primitive")(1.0), 0.8414709848078965, 1e-15);
    EXPECT_DOUBLE_EQ(PointFunction::parse("inv_sqrt")(0.25), 2.0);
    EXPECT_EQ(PointFunction::parse("inv_sqrt")(0.0), 0.0);
    const PointFunction h = PointFunction::parse("heaviside_1/2");
    EXPECT_EQ(h(0.49), 0.0);
    EXPECT_EQ(h(0.5), 1.0);
}

TEST(Builtins, DerivativeMatchesDifferenceQuotient) {
    const PointFunction F = PointFunction::parse("hk_primitive"), f = PointFunction::parse("hk_derivative");
    for (double x : {0.3, 0.55, 0.9}) {
        const double h = 1e-7;
        EXPECT_NEAR((F(x + h) - F(x - h)) / (2 * h), f(x), 1e-4 * (1 + std::abs(f(x)))) << x;
    }
}

TEST(IntervalFunction, CornerExamples) {
    EXPECT_DOUBLE_EQ(IntervalFunction::corner(PointFunction::parse("x1*x2"), 2)(Box::parse("[0,1]x[0,1]")), 1.0);
    EXPECT_DOUBLE_EQ(IntervalFunction::corner(PointFunction::parse("x^2"), 1)(I("1", "2")), 3.0);
    const auto G = IntervalFunction::corner(PointFunction::parse("heaviside_1/2"), 1);
    EXPECT_EQ(G(I("2/5", "3/5")), 1.0);
    EXPECT_EQ(G(I("3/5", "9/10")), 0.0);
}

TEST(IntervalFunction, DomainAndTableErrors) {
    const auto G = IntervalFunction::corner(PointFunction::parse("x"), 1, I("0", "1"));
    EXPECT_THROW((void)G(I("1/2", "2")), std::out_of_range);
    const auto T = IntervalFunction::table(I("0", "1"), 0, {{I("0", "1"), 1.0}}, 0.0);
    EXPECT_DOUBLE_EQ(T(I("0", "1")), 1.0);
    EXPECT_THROW((void)T(I("0", "1/2")), std::out_of_range);
}

TEST(PartitionDefect, HandExamples) {
    const Box unit = I("0", "1");
    const std::vector<Box> halves{I("0", "1/2"), I("1/2", "1")};
    EXPECT_EQ(partition_defect_exact(IntervalFunction::volume(1), unit, halves), Rational(0));
    EXPECT_DOUBLE_EQ(partition_defect(SuperadditiveFn::volume_power(2.0), unit, halves), -0.5);
    EXPECT_NEAR(partition_defect(SuperadditiveFn::volume_power(0.5), unit, halves), 2 * std::sqrt(0.5) - 1, 1e-15);
}

// Random partitions of a box by independent axis cuts.
std::vector<Box> random_grid_partition(const Box& box, std::mt19937_64& rng) {
    std::vector<std::vector<Rational>> cuts(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        std::set<Rational> pts{box.lo(i), box.hi(i)};
        const int n = static_cast<int>(rng() % 4);
        for (int k = 0; k < n; ++k)
            pts.insert(box.lo(i) + box.side(i) * Rational(static_cast<std::int64_t>(1 + rng() % 15), 16));
        cuts[i].assign(pts.begin(), pts.end());
    }
    std::vector<Box> cells;
    std::vector<std::size_t> pos(box.dim(), 0);
    while (true) {
        std::vector<Rational> lo, hi;
        for (std::size_t i = 0; i < box.dim(); ++i) {
            lo.push_back(cuts[i][pos[i]]);
            hi.push_back(cuts[i][pos[i] + 1]);
        }
        cells.emplace_back(lo, hi);
        std::size_t i = 0;
        for (; i < box.dim(); ++i) {
            if (++pos[i] + 1 < cuts[i].size()) break;
            pos[i] = 0;
        }
        if (i == box.dim()) break;
    }
    return cells;
}

TEST(PartitionDefect, CornerFunctionsAreExactlyAdditive) {
    std::mt19937_64 rng(11);
    const Box box = Box::parse("[0,1]x[-1,1/2]");
    const auto poly = IntervalFunction::corner(PointFunction::parse("x1^3*x2 - 2*x1*x2^2 + 1/3"), 2);
    const auto trig = IntervalFunction::corner(PointFunction::parse("sin(x1)*exp(x2)"), 2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cells = random_grid_partition(box, rng);
        EXPECT_EQ(partition_defect_exact(poly, box, cells), Rational(0));
        EXPECT_LE(std::abs(partition_defect(trig, box, cells)), 1e-12);
    }
}

TEST(PartitionDefect, VolumePowersAreSuperadditive) {
    std::mt19937_64 rng(12);
    const Box box = Box::parse("[0,2]x[0,1]");
    for (int trial = 0; trial < 50; ++trial) {
        const auto cells = random_grid_partition(box, rng);
        EXPECT_NEAR(partition_defect(SuperadditiveFn::volume_power(1.0), box, cells), 0.0, 1e-12);
        for (double p : {1.5, 2.0, 3.0}) EXPECT_LE(partition_defect(SuperadditiveFn::volume_power(p), box, cells), 1e-12);
    }
}

TEST(PartitionDefect, RejectsNonPartitions) {
    const std::vector<Box> cells{I("0", "1/2")};
    EXPECT_THROW((void)partition_defect(IntervalFunction::volume(1), I("0", "1"), cells), std::invalid_argument);
}

TEST(SuperadditiveFn, RejectsNonPositiveValues) {
    const auto phi = SuperadditiveFn::from_function([](const Box& q) { return q.lo(0).to_double(); }, "lo");
    EXPECT_THROW((void)phi(I("0", "1")), std::domain_error);
    EXPECT_DOUBLE_EQ(phi(I("1", "2")), 1.0);
}

TEST(Positivity, FindsNegativeCellOfSignedG) {
    EXPECT_FALSE(find_negative_cell(IntervalFunction::corner(PointFunction::parse("x^3"), 1), I("-1", "1"), 4));
    const auto neg = find_negative_cell(IntervalFunction::corner(PointFunction::parse("sin(6*x)"), 1), I("0", "1"), 3);
    ASSERT_TRUE(neg.has_value());
    EXPECT_LT(IntervalFunction::corner(PointFunction::parse("sin(6*x)"), 1)(*neg), 0.0);
}

TEST(Combinators, PointwiseOperations) {
    const PointFunction a = PointFunction::parse("x^2"), b = PointFunction::parse("sin(x)");
    EXPECT_DOUBLE_EQ((a + b)(0.5), 0.25 + std::sin(0.5));
    EXPECT_DOUBLE_EQ((a * b)(0.5), 0.25 * std::sin(0.5));
    EXPECT_DOUBLE_EQ(compose(b, a)(0.5), std::sin(0.25));
    EXPECT_DOUBLE_EQ(scale(a, 3.0)(2.0), 12.0);
}

}  // namespace
}  // namespace gauge
