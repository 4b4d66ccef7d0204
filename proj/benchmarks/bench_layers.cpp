// Forward-pass and learning-step costs at MNIST scale. The forward
// benchmarks report synaptic multiply-adds per second; running them at
// two stimulus intensities shows the event-driven scaling (work tracks
// spikes, not volume).

#include <benchmark/benchmark.h>

#include "spikecnn/encode.hpp"
#include "spikecnn/layers.hpp"
#include "spikecnn/regen.hpp"
#include "spikecnn/rng.hpp"
#include "spikecnn/topology.hpp"

using namespace spikecnn;

namespace {

Image flat_image(int side, std::uint8_t intensity) {
    Image img(1, side, side);
    for (auto& p : img.px) p = intensity;
    return img;
}

void BM_ForwardWindow(benchmark::State& state) {
    const auto intensity = static_cast<std::uint8_t>(state.range(0));
    NetworkTopology topo = parse_topology("28x28-12c5-2a-64c5-2a-10o");
    RngStream wrng(11);
    init_weights(topo, wrng, 0.0, 1.0, 0.0, 0.05);
    ForwardPass fwd(topo, LifParams{});
    RngStream rng(12);
    const SpikeRaster input = poisson_encode(flat_image(28, intensity), 100.0, 250, rng);
    for (auto _ : state) {
        WindowResult res = run_window(fwd, input);
        benchmark::DoNotOptimize(res.output_counts.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(fwd.synaptic_ops()));
    state.counters["synops_per_window"] =
        benchmark::Counter(static_cast<double>(fwd.synaptic_ops()) / state.iterations());
}
BENCHMARK(BM_ForwardWindow)->Arg(32)->Arg(128)->Arg(255)->Unit(benchmark::kMillisecond);

void BM_RegenTrainWindow(benchmark::State& state) {
    NetworkTopology topo = parse_topology("28x28-12c5-2a-64c5-2a-10o");
    RngStream wrng(13);
    init_weights(topo, wrng, 0.0, 2.0);
    RngStream rng(14);
    const SpikeRaster input = poisson_encode(flat_image(28, 128), 100.0, 250, rng);
    LearnConfig cfg;
    LayerTrainer trainer(topo.stacks[0], {1, 28, 28}, LifParams{}, cfg);
    for (auto _ : state) {
        RegenWindowStats stats = trainer.train_window(input);
        benchmark::DoNotOptimize(stats.loss_sum);
    }
    state.SetItemsProcessed(state.iterations() * input.steps);
}
BENCHMARK(BM_RegenTrainWindow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
