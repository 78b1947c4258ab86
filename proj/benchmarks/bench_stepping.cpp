#include <benchmark/benchmark.h>

#include "lbm/grid.hpp"
#include "lbm/stepping.hpp"

using namespace lbm;

namespace {

void run_scheme(benchmark::State& state, Scheme scheme, Precision precision,
                Boundary boundary) {
    const int n = int(state.range(0));
    LatticeGrid grid({n, n, n}, precision);
    grid.fill_equilibrium(1.0, {0.05, 0.0, 0.0});
    const double omega = 1.5;
    for (auto _ : state) {
        if (scheme == Scheme::Fused) {
            step_fused(grid, omega, boundary);
        } else {
            step_baseline(grid, omega, boundary);
        }
        benchmark::DoNotOptimize(grid.active_index());
    }
    // items/s reads as lattice-site updates per second (LUPS).
    state.SetItemsProcessed(state.iterations() * grid.sites());
    state.SetBytesProcessed(state.iterations() * grid.sites() * kQ * 2 *
                            (precision == Precision::Double ? 8 : 4));
}

void BM_FusedDouble(benchmark::State& state) {
    run_scheme(state, Scheme::Fused, Precision::Double, Boundary::periodic());
}
void BM_BaselineDouble(benchmark::State& state) {
    run_scheme(state, Scheme::Baseline, Precision::Double,
               Boundary::periodic());
}
void BM_FusedSingle(benchmark::State& state) {
    run_scheme(state, Scheme::Fused, Precision::Single, Boundary::periodic());
}
void BM_FusedMixed(benchmark::State& state) {
    run_scheme(state, Scheme::Fused, Precision::Mixed, Boundary::periodic());
}
void BM_FusedCavity(benchmark::State& state) {
    run_scheme(state, Scheme::Fused, Precision::Double,
               Boundary::cavity(0.05));
}

} // namespace

BENCHMARK(BM_FusedDouble)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BaselineDouble)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FusedSingle)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FusedMixed)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FusedCavity)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
