#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "decolab/spectral_diffusion.hpp"

using namespace decolab;

namespace {

OuDiffusionModel ladder_model() {
    OuDiffusionModel m;
    m.d_coeff = 3.22e4;
    m.gamma_i = 117.0;
    return m;
}

HomogeneousLine ladder_line() {
    HomogeneousLine line;
    line.gamma_h = 22.0;
    return line;
}

}  // namespace

static void BM_CountsNoIonization(benchmark::State& state) {
    const auto model = ladder_model();
    const auto line = ladder_line();
    for (auto _ : state) benchmark::DoNotOptimize(counts_no_ionization(model, line, 5.0e-3, 0.0));
}
BENCHMARK(BM_CountsNoIonization);

// Solver construction plus one inversion; n_eigen dominates.
static void BM_CountsWithIonization(benchmark::State& state) {
    const auto model = ladder_model();
    const auto line = ladder_line();
    IonizationSink sink;
    sink.strength = 400.0;
    SolverSettings settings;
    settings.n_eigen = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(counts_with_ionization(model, sink, line, 5.0e-3, 0.0, settings));
}
BENCHMARK(BM_CountsWithIonization)->Arg(250)->Arg(2000)->Unit(benchmark::kMillisecond);

// Re-evaluation at a new sink strength from cached kernels, the inner loop
// of the ionization fit.
static void BM_CountsFromKernel(benchmark::State& state) {
    const auto model = ladder_model();
    IonizationSink sink;
    sink.strength = 400.0;
    const SinkSolver solver(model, sink, SolverSettings{}, 0.0);
    const auto kernel = solver.counts_kernel(ladder_line(), 5.0e-3, 0.0);
    double s = 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(SinkSolver::counts_from_kernel(kernel, s));
        s += 1e-3;
    }
}
BENCHMARK(BM_CountsFromKernel);
