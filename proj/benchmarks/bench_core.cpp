#include <benchmark/benchmark.h>

#include <random>

#include "capbp/engine.hpp"
#include "capbp/fixtures.hpp"

namespace {

using namespace capbp;

void BM_NormalizedPressure(benchmark::State& state) {
    const auto f = PressureFunction::normalized({4.0, 500.0});
    double q = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f(q, 100.0));
        q = q >= 120.0 ? 0.0 : q + 0.37;
    }
}
BENCHMARK(BM_NormalizedPressure);

void BM_DecideGrid(benchmark::State& state) {
    const auto scenario = fixture_grid4x4_peak();
    const auto& config = scenario.controllers.at(state.range(0) ? "bpc" : "bp");
    Simulation sim(scenario, "bpc");
    for (int k = 0; k < 300; ++k) sim.advance();
    const auto& net = sim.network();
    for (auto _ : state) {
        benchmark::DoNotOptimize(decide_all(sim.state(), net, std::span(&config, 1), 300));
    }
}
BENCHMARK(BM_DecideGrid)->Arg(0)->Arg(1);

// Full 720-slot peak run of the 4x4 grid per iteration.
void BM_GridRun(benchmark::State& state) {
    auto scenario = fixture_grid4x4_peak();
    const char* controller = state.range(0) == 0 ? "fc" : state.range(0) == 1 ? "bp" : "bpc";
    std::uint64_t seed = 1;
    for (auto _ : state) {
        scenario.run.seed = seed++;
        benchmark::DoNotOptimize(run(scenario, controller));
    }
    state.SetItemsProcessed(state.iterations() * scenario.run.horizon);
}
BENCHMARK(BM_GridRun)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
