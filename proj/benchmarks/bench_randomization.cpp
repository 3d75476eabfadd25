#include "stochnlw/experiments.hpp"
#include "stochnlw/montecarlo.hpp"
#include "stochnlw/randomization.hpp"

#include <benchmark/benchmark.h>

using namespace stochnlw;

namespace {

void BM_randomize_pair(benchmark::State& state) {
    GridSpec g{3, static_cast<int>(state.range(0)), 1};
    WavePair data = reference_pair(g, 1.0, 1.0);
    std::uint64_t sample = 0;
    for (auto _ : state) {
        WavePair w = randomize_pair(data, SeedSpec{17, sample++},
                                    DistributionKind::gaussian);
        benchmark::DoNotOptimize(w.position.coef.data());
    }
}
BENCHMARK(BM_randomize_pair)->Arg(16)->Arg(32);

void BM_tail_sample(benchmark::State& state) {
    GridSpec g{3, 16, 1};
    WavePair data = reference_pair(g, 1.0, 1.0);
    TailNormSpec spec{TailPropagator::s_per, 3.0, 6.0, 0.0, 1.0, 0.02};
    std::size_t index = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(tail_sample_norm(
            spec, data, DistributionKind::gaussian, 17, index++));
}
BENCHMARK(BM_tail_sample);

} // namespace
