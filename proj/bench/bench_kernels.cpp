// Serial reference vs OpenMP kernels.
#include "sip/quadform.hpp"
#include "sip/simulate.hpp"

#include <random>

#include <benchmark/benchmark.h>

namespace {

sip::TimeSeries make_series(std::size_t n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d;
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return sip::TimeSeries(std::move(x));
}

void BM_LagDiffsReference(benchmark::State& state) {
    const auto x = make_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sip::compute_lag_diffs_reference(x, 10));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LagDiffsParallel(benchmark::State& state) {
    const auto x = make_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sip::compute_lag_diffs(x, 10));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

sip::SimConfig bench_config() {
    sip::SimConfig c;
    c.n = 10000;
    c.jumps = 100;
    c.l_min = 20;
    c.reps = 64;
    return c;
}

void BM_ReplicatesSerial(benchmark::State& state) {
    const auto c = bench_config();
    for (auto _ : state) benchmark::DoNotOptimize(sip::run_rejection_study_serial(c));
}

void BM_ReplicatesParallel(benchmark::State& state) {
    const auto c = bench_config();
    for (auto _ : state) benchmark::DoNotOptimize(sip::run_rejection_study(c, 0));
}

}  // namespace

BENCHMARK(BM_LagDiffsReference)->Arg(10000)->Arg(1000000);
BENCHMARK(BM_LagDiffsParallel)->Arg(10000)->Arg(1000000);
BENCHMARK(BM_ReplicatesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
