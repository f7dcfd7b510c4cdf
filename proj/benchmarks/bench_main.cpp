#include <benchmark/benchmark.h>

#include <cmath>
#include <span>

#include "gauge/hk.hpp"
#include "gauge/mc.hpp"
#include "gauge/parallel.hpp"

namespace {

using namespace gauge;

const Box kUnit = Box::interval(Rational(0), Rational(1));

void BM_IntegrateSmooth(benchmark::State& state) {
    const auto f = PointFunction::parse("exp(x)*cos(5*x)");
    const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hk_integrate(f, IntervalFunction::volume(1), kUnit, tol).value);
}
BENCHMARK(BM_IntegrateSmooth)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_IntegrateHkDerivative(benchmark::State& state) {
    const auto f = PointFunction::parse("hk_derivative");
    for (auto _ : state) benchmark::DoNotOptimize(hk_integrate(f, IntervalFunction::volume(1), kUnit, 1e-4).value);
}
BENCHMARK(BM_IntegrateHkDerivative)->Unit(benchmark::kMillisecond);

void BM_IntegrateInvSqrt(benchmark::State& state) {
    const auto f = PointFunction::parse("inv_sqrt");
    for (auto _ : state) benchmark::DoNotOptimize(hk_integrate(f, IntervalFunction::volume(1), kUnit, 1e-4).value);
}
BENCHMARK(BM_IntegrateInvSqrt)->Unit(benchmark::kMicrosecond);

void BM_CousinPartition(benchmark::State& state) {
    // delta(x) = max(x/2, 2^-k) forces refinement toward 0.
    const double floor = std::ldexp(1.0, -static_cast<int>(state.range(0)));
    const Gauge delta = Gauge::from_function(
        [floor](std::span<const double> x) { return std::max(x[0] / 2.0, floor); }, "max(x/2, floor)");
    for (auto _ : state) benchmark::DoNotOptimize(cousin_partition(kUnit, delta).cells.size());
}
BENCHMARK(BM_CousinPartition)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_CousinPartition2D(benchmark::State& state) {
    const Box square = Box({Rational(0), Rational(0)}, {Rational(1), Rational(1)});
    const Gauge delta = Gauge::from_function(
        [](std::span<const double> x) { return 0.02 + 0.5 * std::hypot(x[0], x[1]); }, "0.02 + |x|/2");
    for (auto _ : state) benchmark::DoNotOptimize(cousin_partition(square, delta).cells.size());
}
BENCHMARK(BM_CousinPartition2D)->Unit(benchmark::kMicrosecond);

void BM_DeltaVariationDp(benchmark::State& state) {
    const auto F = IntervalFunction::corner(PointFunction::parse("x^2"), 1);
    const BoxTagFunction psi = [&](const Box& q, std::span<const double> x) { return F(q) - 2.0 * x[0] * q.volume(); };
    const int depth = static_cast<int>(state.range(0));
    const Gauge delta = Gauge::constant(0.1);
    for (auto _ : state) benchmark::DoNotOptimize(delta_variation_dp(psi, kUnit, delta, depth));
}
BENCHMARK(BM_DeltaVariationDp)->Arg(6)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_VerifyMc(benchmark::State& state) {
    const auto F = closed_form_primitive(PointFunction::parse("sin(x)"));
    const auto f = PointFunction::parse("cos(x)");
    const auto pts = chebyshev_points(-1.0, 1.0, 33);
    const auto phi = ControlFunction1D::identity();
    const ScopedThreadCount threads(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(verify_mc(F, f, phi, {-1.0, 1.0}, pts).pass);
}
BENCHMARK(BM_VerifyMc)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
