#include "stochnlw/experiments.hpp"
#include "stochnlw/solver.hpp"

#include <benchmark/benchmark.h>

using namespace stochnlw;

namespace {

void BM_integrator_step(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    GridSpec g{d, static_cast<int>(state.range(1)), 1};
    SolverConfig cfg;
    cfg.dt = 1e-2;
    NlwIntegrator integ(reference_pair(g, 1.5, 1.0), cfg);
    for (auto _ : state) integ.advance();
}
BENCHMARK(BM_integrator_step)
    ->Args({3, 16})
    ->Args({3, 32})
    ->Args({4, 16});

void BM_energy_ledger_row(benchmark::State& state) {
    GridSpec g{4, 16, 1};
    SolverConfig cfg;
    cfg.dt = 1e-2;
    NlwIntegrator integ(LinearFlow(reference_pair(g, 1.5, 1.0)), cfg);
    EnergyLedger ledger;
    ledger.dt = cfg.dt;
    for (auto _ : state) append_ledger_row(ledger, integ);
}
BENCHMARK(BM_energy_ledger_row);

} // namespace
