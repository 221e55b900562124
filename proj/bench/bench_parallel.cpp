// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include "decaykit/amplitude.hpp"
#include "decaykit/heff1d.hpp"
#include "decaykit/subspace.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace decaykit;

namespace {

Execution exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Execution::serial : Execution::parallel; }

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, i / (n - 1.0));
    return g;
}

FiniteLevelModel bench_model() {
    const Index m = 40;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 2, m + 2);
    h(0, 0) = 1.0;
    h(1, 1) = 1.3;
    h(0, 1) = h(1, 0) = 0.05;
    for (Index l = 0; l < m; ++l) {
        h(l + 2, l + 2) = 2.5 * static_cast<double>(l) / static_cast<double>(m - 1);
        h(0, l + 2) = h(l + 2, 0) = 0.04;
        h(1, l + 2) = h(l + 2, 1) = cplx(0.02, 0.01);
    }
    return FiniteLevelModel(h, {0, 1});
}

void BM_probability_curve(benchmark::State& state) {
    const auto d = spectral::SpectralDensity::breit_wigner(25.0, 1.0, 0.0);
    const auto grid = log_grid(0.1, 228.0, 400);
    for (auto _ : state) benchmark::DoNotOptimize(amplitude::survival_probability_curve(d, grid, 1e-10, exec_of(state)));
}

void BM_direct_quadrature(benchmark::State& state) {
    const auto d = spectral::SpectralDensity::breit_wigner(25.0, 1.0, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(amplitude::survival_direct(d, 200.0, 1e-9, exec_of(state)));
}

void BM_heff_curve(benchmark::State& state) {
    const auto d = spectral::SpectralDensity::breit_wigner(25.0, 1.0, 0.0);
    const auto grid = log_grid(1.0, 1000.0, 400);
    for (auto _ : state) benchmark::DoNotOptimize(heff1d::effective_hamiltonian_curve(d, grid, 1e-10, exec_of(state)));
}

void BM_kernel_series(benchmark::State& state) {
    const auto m = bench_model();
    std::vector<double> grid(513);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.02 * static_cast<double>(i);
    for (auto _ : state) benchmark::DoNotOptimize(subspace::kernel_series(m, grid, 2, exec_of(state)));
}

} // namespace

BENCHMARK(BM_probability_curve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_direct_quadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_heff_curve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel_series)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
