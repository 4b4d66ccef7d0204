#include <benchmark/benchmark.h>

#include "spikecnn/grid.hpp"
#include "spikecnn/rng.hpp"

using namespace spikecnn;

namespace {

Grid2D random_grid(int rows, int cols, std::uint64_t seed) {
    RngStream rng(seed);
    Grid2D g(rows, cols);
    for (double& x : g.v) x = rng.uniform(-1.0, 1.0);
    return g;
}

void BM_ConvValid(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const Grid2D in = random_grid(n, n, 1);
    const Grid2D kernel = random_grid(k, k, 2);
    Grid2D out;
    for (auto _ : state) {
        conv2d_valid_into(in, kernel, out);
        benchmark::DoNotOptimize(out.v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()) * k * k);
}
BENCHMARK(BM_ConvValid)->Args({28, 5})->Args({24, 5})->Args({12, 5})->Args({32, 5});

void BM_ConvFull(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const Grid2D in = random_grid(n, n, 3);
    const Grid2D kernel = random_grid(k, k, 4);
    for (auto _ : state) {
        Grid2D out = conv2d_full(in, kernel);
        benchmark::DoNotOptimize(out.v.data());
    }
}
BENCHMARK(BM_ConvFull)->Args({24, 5})->Args({8, 5});

void BM_AvgPool(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D in = random_grid(n, n, 5);
    Grid2D out;
    for (auto _ : state) {
        avg_pool_into(in, 2, out);
        benchmark::DoNotOptimize(out.v.data());
    }
}
BENCHMARK(BM_AvgPool)->Arg(24)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
