#include <benchmark/benchmark.h>

#include <vector>

#include "spikecnn/encode.hpp"
#include "spikecnn/image.hpp"
#include "spikecnn/lif.hpp"
#include "spikecnn/rng.hpp"

using namespace spikecnn;

namespace {

void BM_PoissonEncode(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    Image img(1, side, side);
    RngStream pix(7);
    for (auto& p : img.px) p = static_cast<std::uint8_t>(pix.below(256));
    RngStream rng(8);
    for (auto _ : state) {
        SpikeRaster r = poisson_encode(img, 100.0, 250, rng);
        benchmark::DoNotOptimize(r.events.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side) * side * 250);
}
BENCHMARK(BM_PoissonEncode)->Arg(28)->Arg(32);

void BM_LifStep(benchmark::State& state) {
    const int count = static_cast<int>(state.range(0));
    LifPopulation pop({1, count, 1}, LifParams{});
    RngStream rng(9);
    std::vector<double> current(pop.count());
    for (double& j : current) j = rng.uniform(0.0, 2.0);
    std::vector<std::uint8_t> spikes;
    std::vector<double> integrated;
    for (auto _ : state) {
        lif_step(pop, current, spikes, &integrated);
        benchmark::DoNotOptimize(spikes.data());
    }
    state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_LifStep)->Arg(576)->Arg(6912)->Arg(36864);

}  // namespace

BENCHMARK_MAIN();
