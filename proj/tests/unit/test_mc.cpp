#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gauge/mc.hpp"

namespace gauge {
namespace {

PointFunction P(const char* text) { return PointFunction::parse(text); }
Primitive1D Closed(const char* text) { return closed_form_primitive(P(text)); }
const ControlFunction1D kId = ControlFunction1D::identity();
constexpr std::pair<double, double> kSym{-1.0, 1.0};

TEST(McDefect, SmoothPrimitiveIsBoundedByHalfStep) {
    const auto rec = mc_defect(Closed("x^2/2"), P("x"), kId, 0.3, kSym);
    const auto h = default_h_levels();
    ASSERT_EQ(rec.q.size(), h.size());
    // |F(y) - F(x) - x (y - x)| / |y - x| = |y - x| / 2.
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_LE(rec.q[i], h[i] / 2.0 * (1.0 + 1e-6));
    EXPECT_TRUE(verify_mc(Closed("x^2/2"), P("x"), kId, kSym, {0.3}).pass);
}

TEST(McDefect, KinkWithWrongDerivativeStaysAtOne) {
    const auto rec = mc_defect(Closed("abs(x)"), P("0"), kId, 0.0, kSym);
    for (double q : rec.q) EXPECT_NEAR(q, 1.0, 1e-12);
    EXPECT_NEAR(rec.witness_q, 1.0, 1e-12);
}

TEST(McDefect, OscillatingPrimitiveAtOrigin) {
    const auto rec = mc_defect(Closed("hk_primitive"), P("hk_derivative"), kId, 0.0, kSym);
    const auto h = default_h_levels();
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_LE(rec.q[i], h[i] * (1.0 + 1e-9));
}

TEST(McDefect, ProbesOutsideTheDomainAreSkipped) {
    // At the left end only right probes exist; none may evaluate log at <= 0.
    const auto rec = mc_defect(Closed("x*log(x) - x"), P("log(x)"), kId, 1e-6, {0.0, 1.0});
    EXPECT_EQ(rec.q.size(), default_h_levels().size());
}

TEST(McDefect, NonIncreasingControlIsRejected) {
    const auto flat = ControlFunction1D::from_function([](double) { return 1.0; }, "one");
    EXPECT_THROW((void)mc_defect(Closed("x"), P("1"), flat, 0.0, kSym), InvalidControl);
}

TEST(VerifyMc, PassesForTrueDerivativeAndNamesFailures) {
    const auto pts = chebyshev_points(-1.0, 1.0, 9);
    EXPECT_TRUE(verify_mc(Closed("sin(x)"), P("cos(x)"), kId, kSym, pts).pass);

    std::vector<double> with_zero = pts;
    with_zero.push_back(0.0);
    const auto v = verify_mc(Closed("abs(x)"), P("0"), kId, kSym, with_zero);
    EXPECT_FALSE(v.pass);
    const auto bad = v.failing_points();
    ASSERT_FALSE(bad.empty());
    EXPECT_NE(std::find(bad.begin(), bad.end(), 0.0), bad.end());
    EXPECT_NE(v.to_csv().find("x,"), std::string::npos);
}

TEST(ChebyshevPoints, AscendingInsideInterval) {
    const auto p = chebyshev_points(2.0, 5.0, 16);
    ASSERT_EQ(p.size(), 16u);
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_GT(p[i], 2.0);
        EXPECT_LT(p[i], 5.0);
        if (i > 0) {
            EXPECT_LT(p[i - 1], p[i]);
        }
    }
}

TEST(Rescale, AffineMapAndPositiveAlpha) {
    const auto r = rescale(kId, 2.0, 3.0);
    for (double x : {-1.0, 0.0, 0.25, 7.0}) EXPECT_DOUBLE_EQ(r(x), 2.0 * x + 3.0);
    EXPECT_DOUBLE_EQ(r.difference(0.5, 0.25), 0.5);
    EXPECT_THROW((void)rescale(kId, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW((void)rescale(kId, -1.0, 0.0), std::invalid_argument);
}

TEST(Rescale, VerdictIsInvariantForClearCases) {
    const auto pts = chebyshev_points(-1.0, 1.0, 8);
    for (double alpha : {0.5, 2.0, 10.0}) {
        const auto phi = rescale(kId, alpha, -4.0);
        EXPECT_TRUE(verify_mc(Closed("x^3"), P("3*x^2"), phi, kSym, pts).pass) << alpha;
        EXPECT_FALSE(verify_mc(Closed("x^3"), P("3*x^2 + 1"), phi, kSym, pts).pass) << alpha;
    }
}

TEST(CombineControls, SumWithIdentity) {
    const auto c = combine_controls(CombineMode::SumWithIdentity, kId, kId);
    for (double x : {-0.5, 0.0, 0.75}) EXPECT_DOUBLE_EQ(c(x), 3.0 * x);
}

TEST(CombineControls, ComposeAndMonotonicityCheck) {
    const auto c = combine_controls(CombineMode::Compose, kId, ControlFunction1D::parse("x^2"), P("x"),
                                    std::pair{0.0, 1.0});
    for (double x : {0.1, 0.5, 0.9}) EXPECT_NEAR(c(x), x * x + x, 1e-15);
    EXPECT_THROW((void)combine_controls(CombineMode::Compose, kId, kId, P("x^2"), std::pair{-1.0, 1.0}),
                 InvalidControl);
    EXPECT_THROW((void)combine_controls(CombineMode::Compose, kId, kId), std::invalid_argument);
}

TEST(CombineControls, AddingAnIncreasingControlKeepsAPass) {
    const auto pts = chebyshev_points(-1.0, 1.0, 8);
    const auto F = Closed("exp(x)");
    const auto f = P("exp(x)");
    ASSERT_TRUE(verify_mc(F, f, kId, kSym, pts).pass);
    const auto bigger = combine_controls(CombineMode::SumWithIdentity, kId, ControlFunction1D::parse("x^3"));
    EXPECT_TRUE(verify_mc(F, f, bigger, kSym, pts).pass);
}

TEST(GlueControls, JumpAtTheJoin) {
    const auto g = glue_controls(Closed("x^2/2"), kId, Closed("x^2/2 + 5"), kId, 0.0, 1.0, 2.0);
    EXPECT_NEAR(g.F1_left, 0.5, 1e-9);
    EXPECT_NEAR(g.F2_right, 5.5, 1e-9);
    EXPECT_DOUBLE_EQ(g.F.value(1.0), 0.0);
    EXPECT_DOUBLE_EQ(g.phi(1.0), 0.0);
    EXPECT_NEAR(g.phi(1.0 - 1e-9), -1.0, 1e-8);
    EXPECT_NEAR(g.phi(1.0 + 1e-9), 1.0, 1e-8);
    ASSERT_EQ(g.phi.jumps().size(), 1u);
    EXPECT_EQ(g.phi.jumps()[0].at, 1.0);
    // The jump absorbs the shift of F2, so the glued pair passes at the join.
    const auto v = verify_mc(g.F, P("x"), g.phi, {0.0, 2.0}, {0.5, 1.0, 1.5});
    EXPECT_TRUE(v.pass);
}

TEST(BoundedControl, SingleTermIsHalfTheNormalisedControl) {
    const auto bc = bounded_control({kId}, {0.0}, {1.0}, 1);
    EXPECT_DOUBLE_EQ(bc.phi(0.5), 0.25);
    EXPECT_DOUBLE_EQ(bc.phi(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(bc.phi(2.0), 0.5);
    EXPECT_DOUBLE_EQ(bc.tail, 0.5);
}

TEST(BoundedControl, NestedIntervalsGiveStrictlyIncreasingValuesInUnitInterval) {
    std::vector<ControlFunction1D> phis;
    std::vector<double> a, b;
    for (int k = 1; k <= 20; ++k) {
        phis.push_back(kId);
        a.push_back(1.0 / (k + 2));
        b.push_back(1.0 - 1.0 / (k + 2));
    }
    const auto bc = bounded_control(phis, a, b, 20);
    EXPECT_DOUBLE_EQ(bc.tail, std::ldexp(1.0, -20));
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double x = 0.05 + 0.9 * i / 101.0;
        const double v = bc.phi(x);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
        if (i > 1) {
            EXPECT_GT(v, prev) << x;
        }
        prev = v;
    }
}

TEST(BoundedControl, RejectsBadInput) {
    EXPECT_THROW((void)bounded_control({kId, kId}, {0.0, 0.2}, {1.0, 2.0}), std::invalid_argument);
    const auto dec = ControlFunction1D::from_function([](double x) { return -x; }, "-x");
    EXPECT_THROW((void)bounded_control({dec}, {0.0}, {1.0}), InvalidControl);
    EXPECT_THROW((void)bounded_control({kId}, {0.0}, {1.0}, 0), std::invalid_argument);
}

MctInput constant_sequence(const char* f) {
    MctInput in;
    in.f_k = [f](int) { return P(f); };
    in.F_k = [](int) { return Closed("x^2/2"); };
    in.phi_k = [](int) { return kId; };
    in.F = Closed("x^2/2");
    return in;
}

TEST(MctControl, ConstantSequence) {
    const std::vector<double> grid{0.25, 0.5, 0.75};
    const auto c = mct_control(constant_sequence("x"), 8, grid);
    EXPECT_NEAR(c.limit_integral, 0.5, 1e-9);
    EXPECT_FALSE(c.subsequence.empty());
    for (std::size_t i = 1; i < c.subsequence.size(); ++i) EXPECT_LT(c.subsequence[i - 1], c.subsequence[i]);
    double prev = c.phi(0.01);
    for (int i = 2; i <= 99; ++i) {
        const double v = c.phi(i / 100.0);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_TRUE(verify_mc(Closed("x^2/2"), P("x"), c.phi, {0.0, 1.0}, grid).pass);
}

TEST(MctControl, UnboundedIntegralsDiverge) {
    MctInput in;
    in.f_k = [](int k) { return PointFunction::constant(k); };
    in.F_k = [](int k) {
        return Primitive1D{[k](double x) { return k * x; }, [k](double y, double x) { return k * (y - x); }, "kx"};
    };
    in.phi_k = [](int) { return kId; };
    in.F = Closed("x");
    EXPECT_THROW((void)mct_control(in, 12, {0.5}), MctDivergence);
}

TEST(MctControl, RejectsDecreasingSequence) {
    MctInput in = constant_sequence("x");
    in.f_k = [](int k) { return PointFunction::constant(-k); };
    EXPECT_THROW((void)mct_control(in, 4, {0.5}), std::invalid_argument);
}

TEST(GaugeFromControl, LinearDerivativeGetsAUniformGauge) {
    const Box dom = Box::interval(Rational(0), Rational(1));
    const auto F = IntervalFunction::corner(P("x^2"), 1);
    const auto G = IntervalFunction::volume(1);
    const auto delta = gauge_from_control(F, P("2*x"), G, SuperadditiveFn::volume_power(1.0), 0.1, dom, 10, 4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) EXPECT_GE(delta(u(rng)), 0.05);
}

TEST(GaugeFromControl, ExactPrimitiveGivesTheWholeDomain) {
    const Box dom = Box::interval(Rational(0), Rational(1));
    const auto delta = gauge_from_control(IntervalFunction::corner(P("0"), 1), P("0"), IntervalFunction::volume(1),
                                          SuperadditiveFn::volume_power(1.0), 0.01, dom, 8, 3);
    for (double x : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(delta(x), 1.0);
}

TEST(GaugeScaleAt, ThrowsWhenFinestScaleFails) {
    const Box dom = Box::interval(Rational(-1), Rational(1));
    EXPECT_THROW((void)gauge_scale_at(IntervalFunction::corner(P("abs(x)"), 1), P("0"), IntervalFunction::volume(1),
                                      SuperadditiveFn::volume_power(1.0), 0.5, dom, {0.0}, 6),
                 std::runtime_error);
}

TEST(ControlFromGauges, ZeroDefectGivesVolume) {
    const Box dom = Box::interval(Rational(0), Rational(1));
    const BoxTagFunction zero = [](const Box&, std::span<const double>) { return 0.0; };
    std::vector<Gauge> gauges(3, Gauge::constant(0.3));
    const auto phi = control_from_gauges(zero, gauges, dom, 4);
    ASSERT_NE(phi.entries(), nullptr);
    for (const auto& [box, value] : *phi.entries()) EXPECT_DOUBLE_EQ(value, box.volume());
    EXPECT_LE(superadditivity_defect(phi), 1e-15);
}

TEST(ControlFromGauges, RejectsUncertifiedGauge) {
    const Box dom = Box::interval(Rational(0), Rational(1));
    const BoxTagFunction one = [](const Box&, std::span<const double>) { return 1.0; };
    EXPECT_THROW((void)control_from_gauges(one, {Gauge::constant(2.0)}, dom, 3), std::invalid_argument);
}

TEST(ControlFromGauges, CertifiedGaugesYieldASuperadditiveControl) {
    const Box dom = Box::interval(Rational(0), Rational(1));
    const auto F = IntervalFunction::corner(P("x^2"), 1);
    const auto f = P("2*x");
    const BoxTagFunction psi = [&](const Box& q, std::span<const double> x) {
        return F(q) - f(x) * q.volume();
    };
    std::vector<Gauge> gauges;
    for (int k = 1; k <= 4; ++k) {
        auto g = find_certified_gauge(psi, dom, k, 8);
        ASSERT_TRUE(g.has_value()) << k;
        gauges.push_back(*g);
    }
    const auto phi = control_from_gauges(psi, gauges, dom, 8);
    EXPECT_LE(superadditivity_defect(phi), 1e-12);
    const auto v = verify_mc_nd(F, f, IntervalFunction::volume(1), phi, dom, {{0.3}, {0.7}}, 4, 8, 1e-2);
    EXPECT_TRUE(v.pass);
}

}  // namespace
}  // namespace gauge
