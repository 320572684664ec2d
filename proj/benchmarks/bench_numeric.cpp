#include <benchmark/benchmark.h>

#include "qqkit/bethe.hpp"
#include "qqkit/oper_numeric.hpp"

using namespace qqkit;
using Complex = std::complex<double>;

static void BM_QEval(benchmark::State& state) {
    oper::QFunction q(1.0, 0.3);
    double e = 2.0;
    for (auto _ : state) {
        auto v = q.evaluate(Complex(e, 0.0), q.params());
        benchmark::DoNotOptimize(v.mantissa);
        e += 0.01;  // defeat any caching
    }
}
BENCHMARK(BM_QEval);

static void BM_QEvalSteep(benchmark::State& state) {
    oper::QIntegration p;
    p.x_max = 12.0;
    p.rtol = 1e-10;
    oper::QFunction q(2.4, 0.3, p);
    double e = 5.0;
    for (auto _ : state) {
        auto v = q.evaluate(Complex(e, 0.0), q.params());
        benchmark::DoNotOptimize(v.mantissa);
        e += 0.01;
    }
}
BENCHMARK(BM_QEvalSteep);

static void BM_BaeResidual(benchmark::State& state) {
    bethe::BetheSystem sys;
    sys.algebra = &lie::load_algebra('B', 2);
    sys.beta2 = 0.31830988618;
    sys.v = {Complex(1.2, 0.3), Complex(0.7, -0.4)};
    sys.degrees = {3, 2};
    bethe::Roots roots{{Complex(1.1, 0.2), Complex(-0.5, 0.9), Complex(0.2, 1.4)},
                       {Complex(0.3, -1.2), Complex(-1.4, 0.2)}};
    for (auto _ : state) {
        auto r = bethe::bae_residuals(sys, roots);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_BaeResidual);

static void BM_Monodromy(benchmark::State& state) {
    oper::OperSpecZ spec{0.1, 0.8, {Complex(0.7, 0.0)}, 1.0};
    for (auto _ : state) {
        auto m = oper::monodromy_matrix(spec, 0, 0.35, Complex(20.0, 0.0));
        benchmark::DoNotOptimize(m.deviation_from_identity);
    }
}
BENCHMARK(BM_Monodromy);

BENCHMARK_MAIN();
