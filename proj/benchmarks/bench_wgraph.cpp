#include <cmath>

#include <benchmark/benchmark.h>

#include "wgraph/effective_1d.hpp"
#include "wgraph/resonance.hpp"
#include "wgraph/transverse.hpp"
#include "wgraph/waveguide2d.hpp"

using namespace wg;

namespace {

std::vector<cplx> smooth_rhs(const Grid1D& grid) {
    std::vector<cplx> f(grid.size());
    for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
        const double s = grid.node(j) - 2.0;
        f[j] = std::exp(-s * s);
    }
    return f;
}

WaveguideGeometry geometry(double eps) {
    ScalingParams sc;
    sc.epsilon = eps;
    sc.delta_ratio = 0.05;
    return WaveguideGeometry(CurvatureProfile::smooth_bump(1.0), 1.0, 0.5, sc);
}

}  // namespace

static void BM_SymmetricSpectrum(benchmark::State& state) {
    const int n_max = static_cast<int>(state.range(0));
    double alpha = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(symmetric_spectrum(alpha, 1.0, n_max));
        alpha = alpha > 3.0 ? -3.0 : alpha + 0.01;
    }
}
BENCHMARK(BM_SymmetricSpectrum)->Arg(3)->Arg(20);

static void BM_BetaTable(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(-5.0 + 0.1 * i);
    for (auto _ : state) benchmark::DoNotOptimize(beta_table(grid, 1.0, 3));
}
BENCHMARK(BM_BetaTable)->Unit(benchmark::kMillisecond);

static void BM_ZeroEnergySolve(benchmark::State& state) {
    const Potential1D v = Potential1D::from_profile(CurvatureProfile::smooth_bump(1.0), -9.3147576807214);
    ZeroEnergyOptions opt;
    opt.samples = 0;
    for (auto _ : state) benchmark::DoNotOptimize(zero_energy_solve(v, opt).D);
}
BENCHMARK(BM_ZeroEnergySolve)->Unit(benchmark::kMillisecond);

static void BM_ResolventSolve1D(benchmark::State& state) {
    const Grid1D grid{20.0, static_cast<std::size_t>(state.range(0))};
    const Discrete1DOperator op = build_h_n_eps(CurvatureProfile::smooth_bump(1.0), 2.0, 0.4, 0.0, grid);
    const auto f = smooth_rhs(grid);
    for (auto _ : state) benchmark::DoNotOptimize(resolvent_solve(op, cplx(0.0, 1.0), f));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResolventSolve1D)->RangeMultiplier(4)->Range(4096, 65536)->Complexity(benchmark::oN);

static void BM_WaveguideFactor(benchmark::State& state) {
    const double eps = 0.2;
    const Grid2D grid{Grid1D::with_spacing(10.0, eps * 2.0 / 50.0), static_cast<int>(state.range(0)), 1.0};
    const DiscreteWaveguideOperator op = build_waveguide(geometry(eps), WaveguideVariant::full_H, 1, grid);
    const ModeProjector proj(op, 1);
    for (auto _ : state) {
        WaveguideResolvent r(op, proj, 0, cplx(0.0, 1.0));
        benchmark::DoNotOptimize(r.sigma());
    }
}
BENCHMARK(BM_WaveguideFactor)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_WaveguideReducedResolvent(benchmark::State& state) {
    const double eps = 0.2;
    const Grid2D grid{Grid1D::with_spacing(10.0, eps * 2.0 / 50.0), 32, 1.0};
    const DiscreteWaveguideOperator op = build_waveguide(geometry(eps), WaveguideVariant::full_H, 1, grid);
    const ModeProjector proj(op, 1);
    const auto f = smooth_rhs(grid.s);
    for (auto _ : state) benchmark::DoNotOptimize(reduced_resolvent(op, proj, 0, 0, cplx(0.0, 1.0), f));
}
BENCHMARK(BM_WaveguideReducedResolvent)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
