// OpenMP kernels against their serial references on the same inputs.

#include "pitlab/eval.hpp"
#include "pitlab/growth.hpp"

#include <benchmark/benchmark.h>

namespace {

const pitlab::CoefficientSequence& family() {
    static const pitlab::CoefficientSequence seq = pitlab::make_quadratic_phase(pitlab::AlphaSpec::parse("sqrt2"));
    return seq;
}

pitlab::GridSpec grid(int n_theta) {
    pitlab::GridSpec g;
    for (int i = 0; i < 8; ++i) g.r_values.push_back(5.0 + 5.0 * i);
    g.n_theta = n_theta;
    return g;
}

void BM_EvalGridParallel(benchmark::State& state) {
    const auto g = grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pitlab::eval_grid(family(), g));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_EvalGridSerial(benchmark::State& state) {
    const auto g = grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pitlab::eval_grid_serial(family(), g));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_IndicatorParallel(benchmark::State& state) {
    const auto theta = pitlab::uniform_angles(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pitlab::indicator_estimate(family(), theta, 20.0, 40.0, 1.0));
}

void BM_IndicatorSerial(benchmark::State& state) {
    const auto theta = pitlab::uniform_angles(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pitlab::indicator_estimate_serial(family(), theta, 20.0, 40.0, 1.0));
}

}  // namespace

BENCHMARK(BM_EvalGridParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvalGridSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IndicatorParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IndicatorSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
