#include <benchmark/benchmark.h>

#include <vector>

#include "ldacs/datapath.hpp"
#include "ldacs/harness.hpp"
#include "ldacs/rng.hpp"

namespace {

using namespace ldacs;

const PhyParams& params() {
    static const PhyParams p{};
    return p;
}

const PreambleTemplate& preamble() {
    static const PreambleTemplate tpl = generate_preamble(params());
    return tpl;
}

const Synchronizer& synchronizer() {
    static const Synchronizer s(params(), preamble());
    return s;
}

ExperimentConfig experiment() {
    ExperimentConfig cfg;
    cfg.channel = make_scenario(Scenario::awgn, 6.0, 0.3);
    cfg.sync = SyncConfig::defaults(params());
    return cfg;
}

void BM_TrialsParallel(benchmark::State& state) {
    const auto cfg = experiment();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trials(synchronizer(), cfg, state.range(0), 11));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrialsSerial(benchmark::State& state) {
    const auto cfg = experiment();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trials_serial(synchronizer(), cfg, state.range(0), 11));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<FixedValue> c2_stream(int fx, std::size_t n) {
    Rng rng(5);
    const QFormat fmt = q_unsigned(2, fx);
    std::vector<FixedValue> v(n);
    for (auto& x : v) {
        x = quantize(rng.uniform() * 1.5, fmt);
    }
    return v;
}

void BM_XcrDirect(benchmark::State& state) {
    const auto in = c2_stream(static_cast<int>(state.range(0)), 1 << 14);
    for (auto _ : state) {
        benchmark::DoNotOptimize(xcr_direct(in, preamble()));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}

void BM_XcrTranspose(benchmark::State& state) {
    const auto in = c2_stream(static_cast<int>(state.range(0)), 1 << 14);
    for (auto _ : state) {
        benchmark::DoNotOptimize(xcr_transpose(in, preamble()));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}

}  // namespace

BENCHMARK(BM_TrialsParallel)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrialsSerial)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_XcrDirect)->Arg(4)->Arg(12)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_XcrTranspose)->Arg(4)->Arg(12)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
