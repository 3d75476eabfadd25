#include "stochnlw/experiments.hpp"
#include "stochnlw/norms.hpp"
#include "stochnlw/transform.hpp"

#include <benchmark/benchmark.h>

using namespace stochnlw;

namespace {

void BM_synthesize(benchmark::State& state) {
    GridSpec g{3, static_cast<int>(state.range(0)), 1};
    SpectralField f = reference_pair(g, 1.0, 1.0).position;
    for (auto _ : state) {
        auto s = synthesize(f);
        benchmark::DoNotOptimize(s.data());
    }
}
BENCHMARK(BM_synthesize)->Arg(16)->Arg(32)->Arg(64);

void BM_roundtrip(benchmark::State& state) {
    GridSpec g{3, static_cast<int>(state.range(0)), 1};
    SpectralField f = reference_pair(g, 1.0, 1.0).position;
    for (auto _ : state) {
        SpectralField back = analyze(g, synthesize(f));
        benchmark::DoNotOptimize(back.coef.data());
    }
}
BENCHMARK(BM_roundtrip)->Arg(16)->Arg(32);

void BM_lebesgue_norm(benchmark::State& state) {
    GridSpec g{3, 32, 1};
    SpectralField f = reference_pair(g, 1.0, 1.0).position;
    double r = static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(lebesgue_norm(f, r));
}
BENCHMARK(BM_lebesgue_norm)->Arg(4)->Arg(6);

} // namespace

BENCHMARK_MAIN();
