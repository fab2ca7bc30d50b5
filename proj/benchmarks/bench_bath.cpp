#include <benchmark/benchmark.h>

#include "decolab/random.hpp"
#include "decolab/spin_bath.hpp"

using namespace decolab;

// One bath draw plus its T2*; cost grows with the expected spin count.
static void BM_SampleT2star(benchmark::State& state) {
    BathConfig cfg;
    cfg.concentration = static_cast<double>(state.range(0)) * 1e-6;
    Rng rng = make_stream(42, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sample_t2star(cfg, rng));
    state.counters["spins"] = expected_spin_count(cfg);
}
BENCHMARK(BM_SampleT2star)->Arg(13)->Arg(442)->Arg(11000);

static void BM_T2starDistribution(benchmark::State& state) {
    BathConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(t2star_distribution(cfg, static_cast<std::size_t>(state.range(0)), 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_T2starDistribution)->Arg(1000)->Unit(benchmark::kMillisecond);
