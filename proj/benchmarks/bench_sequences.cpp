#include <benchmark/benchmark.h>

#include <vector>

#include "decolab/feedforward.hpp"
#include "decolab/noise_model.hpp"
#include "decolab/pulse_sequences.hpp"

using namespace decolab;

static void BM_PhaseCpmg(benchmark::State& state) {
    const auto model = table1_model();
    const int n = static_cast<int>(state.range(0));
    double t0 = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phase_cpmg(model, n, 1.0e-3, t0));
        t0 += 1.0e-6;
    }
}
BENCHMARK(BM_PhaseCpmg)->RangeMultiplier(4)->Range(1, 1024);

// The unsynchronized average with automatic node count, as used by sweeps.
static void BM_ExpectationUnsynchronized(benchmark::State& state) {
    const auto model = table1_model();
    const auto seq = PulseSequence::cpmg(static_cast<int>(state.range(0)), 0.9e-3);
    for (auto _ : state) benchmark::DoNotOptimize(expectation_unsynchronized(model, seq, 0));
}
BENCHMARK(BM_ExpectationUnsynchronized)->Arg(4)->Arg(32)->Arg(256);

static void BM_FilterFunction(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    double omega = 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(filter_function(omega, n, 1.0e-3));
        omega += 0.1;
    }
}
BENCHMARK(BM_FilterFunction)->Arg(8)->Arg(1024);

static void BM_Feedforward(benchmark::State& state) {
    const auto model = table1_model();
    std::vector<double> taus;
    for (int i = 1; i <= state.range(0); ++i) taus.push_back(1.0e-4 * i);
    const ShotConfig shots;
    const AmplitudeScaleProcess drift;
    FeedforwardOptions opts;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_feedforward(model, taus, shots, drift, opts));
        ++opts.seed;
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Feedforward)->Arg(8)->Unit(benchmark::kMillisecond);
