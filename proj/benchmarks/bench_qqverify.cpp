#include <benchmark/benchmark.h>

#include "qqkit/qqverify.hpp"

using namespace qqkit;

static void BM_ChiSeries(benchmark::State& state) {
    const auto& g = lie::load_algebra('F', 4);
    const int depth = int(state.range(0));
    for (auto _ : state) {
        auto cs = qq::chi_series(g, 0, 0, depth);
        benchmark::DoNotOptimize(cs.value);
    }
}
BENCHMARK(BM_ChiSeries)->Arg(4)->Arg(8)->Arg(12);

static void BM_VerifyQQ(benchmark::State& state) {
    const auto& g = lie::load_algebra('G', 2);
    const int depth = int(state.range(0));
    for (auto _ : state) {
        auto rep = qq::verify_qq_system(g, 0, depth);
        benchmark::DoNotOptimize(rep.status);
    }
}
BENCHMARK(BM_VerifyQQ)->Arg(4)->Arg(6)->Arg(8);

static void BM_VerifySweepDepth6(benchmark::State& state) {
    for (auto _ : state) {
        bool ok = true;
        for (const char* name : {"A1", "A2", "A3", "B2", "B3", "C2", "C3", "D4", "G2", "F4"}) {
            const auto& g = lie::load_algebra(name);
            for (int i = 0; i < g.rank; ++i) ok &= qq::verify_qq_system(g, i, 6).ok();
        }
        benchmark::DoNotOptimize(ok);
    }
}
BENCHMARK(BM_VerifySweepDepth6);
