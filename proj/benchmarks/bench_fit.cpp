#include <benchmark/benchmark.h>

#include "decolab/fit.hpp"

using namespace decolab;

static void BM_FitStretchedExp(benchmark::State& state) {
    DecayCurve curve;
    for (int i = 1; i <= state.range(0); ++i) {
        const double x = 25.0 * i / state.range(0);
        curve.x.push_back(x);
        curve.y.push_back(stretched_exp(x, 0.93, 11.2, 1.7));
        curve.sigma.push_back(0.01);
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_stretched_exp(curve));
}
BENCHMARK(BM_FitStretchedExp)->Arg(24)->Arg(240);
