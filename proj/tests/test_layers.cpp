#include "doctest.h"
#include "spikecnn/errors.hpp"
#include "spikecnn/layers.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace spikecnn;

namespace {

Grid2D frame_map_as_grid(const std::uint8_t* frame, int map, int rows, int cols) {
    Grid2D g(rows, cols);
    const std::uint8_t* src = frame + static_cast<std::size_t>(map) * rows * cols;
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = src[i];
    return g;
}

void random_spikes(RngStream& rng, std::vector<std::uint8_t>& frame, double p) {
    for (auto& b : frame) b = rng.bernoulli(p) ? 1 : 0;
}

}  // namespace

TEST_CASE("conv layer current equals the summed valid correlation of input spikes") {
    NetworkTopology topo = parse_topology("6x6x2-3c3-1o");
    RngStream init(5);
    init_weights(topo, init, -1.0, 1.0);
    ForwardPass fwd(topo, LifParams{});

    RngStream rng(6);
    std::vector<std::uint8_t> frame(2 * 6 * 6);
    for (int t = 0; t < 25; ++t) {
        random_spikes(rng, frame, 0.35);
        fwd.step(frame.data());

        const LayerState& conv = fwd.layer(1);
        for (int k = 0; k < 3; ++k) {
            Grid2D expect(4, 4);
            for (int l = 0; l < 2; ++l) {
                Grid2D x = frame_map_as_grid(frame.data(), l, 6, 6);
                Grid2D part = oracle::conv_valid(x, topo.stacks[0].kernel(k, l));
                for (std::size_t i = 0; i < expect.v.size(); ++i) expect.v[i] += part.v[i];
            }
            for (int i = 0; i < 16; ++i)
                CHECK(conv.current[static_cast<std::size_t>(k) * 16 + i] == doctest::Approx(expect.v[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("pooling thresholds the averaged pre-reset potentials") {
    NetworkTopology topo = parse_topology("2x2-1c1-2a-1o");
    RngStream init(1);
    init_weights(topo, init);
    topo.stacks[0].w[0] = 26.0;  // one input spike drives v to 0.05*26 = 1.3

    ForwardPass fwd(topo, LifParams{});
    std::vector<std::uint8_t> all_on{1, 1, 1, 1};
    fwd.step(all_on.data());

    const LayerState& conv = fwd.layer(1);
    const LayerState& pool = fwd.layer(2);
    for (int i = 0; i < 4; ++i) {
        CHECK(conv.potential[i] == doctest::Approx(1.3));
        CHECK(conv.spikes[i] == 1);
        CHECK(conv.pop.v[i] == 0.0);  // reset happened
    }
    // The pool still sees the pre-reset 1.3 average and fires.
    CHECK(pool.potential[0] == doctest::Approx(1.3));
    CHECK(pool.spikes[0] == 1);
}

TEST_CASE("pooling stays silent when the window average is subthreshold") {
    NetworkTopology topo = parse_topology("2x2-1c1-2a-1o");
    RngStream init(1);
    init_weights(topo, init);
    topo.stacks[0].w[0] = 26.0;

    ForwardPass fwd(topo, LifParams{});
    std::vector<std::uint8_t> half{1, 1, 0, 0};
    fwd.step(half.data());

    const LayerState& conv = fwd.layer(1);
    const LayerState& pool = fwd.layer(2);
    CHECK(conv.spikes[0] == 1);
    CHECK(conv.spikes[1] == 1);
    CHECK(conv.spikes[2] == 0);
    // average (1.3 + 1.3 + 0 + 0) / 4 = 0.65 < 1.2
    CHECK(pool.potential[0] == doctest::Approx(0.65));
    CHECK(pool.spikes[0] == 0);
}

TEST_CASE("pool units hold no state across steps") {
    NetworkTopology topo = parse_topology("2x2-1c1-2a-1o");
    RngStream init(1);
    init_weights(topo, init);
    topo.stacks[0].w[0] = 20.0;  // v jumps to 1.0 per active step, subthreshold

    ForwardPass fwd(topo, LifParams{});
    std::vector<std::uint8_t> all_on{1, 1, 1, 1};
    std::vector<std::uint8_t> silent{0, 0, 0, 0};

    fwd.step(all_on.data());
    const double p1 = fwd.layer(2).potential[0];
    CHECK(p1 == doctest::Approx(1.0));
    CHECK(fwd.layer(2).spikes[0] == 0);

    // With silent input the conv membrane decays; the pool output must
    // track the instantaneous average only, not accumulate.
    fwd.step(silent.data());
    CHECK(fwd.layer(2).potential[0] == doctest::Approx(0.95));
    fwd.step(silent.data());
    CHECK(fwd.layer(2).potential[0] == doctest::Approx(0.9025));
}

TEST_CASE("output layer current is the readout row sum over active features") {
    NetworkTopology topo = parse_topology("3x3-2o");
    RngStream init(9);
    init_weights(topo, init, 0.0, 1.0, -1.0, 1.0);
    ForwardPass fwd(topo, LifParams{});

    RngStream rng(10);
    std::vector<std::uint8_t> frame(9);
    for (int t = 0; t < 20; ++t) {
        random_spikes(rng, frame, 0.4);
        fwd.step(frame.data());
        const LayerState& out = fwd.layer(1);
        for (int j = 0; j < 2; ++j) {
            double expect = 0.0;
            for (int i = 0; i < 9; ++i)
                if (frame[i]) expect += topo.readout.at(j, i);
            CHECK(out.current[j] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("run_window resets state and is replayable") {
    NetworkTopology topo = parse_topology("8x8-2c3-2a-4o");
    RngStream init(21);
    init_weights(topo, init);
    ForwardPass fwd(topo, LifParams{});

    SpikeRaster raster({1, 8, 8}, 40);
    RngStream rng(22);
    for (auto& e : raster.events) e = rng.bernoulli(0.2) ? 1 : 0;

    WindowResult r1 = run_window(fwd, raster);
    WindowResult r2 = run_window(fwd, raster);  // same pass object, reset inside
    CHECK(r1.spikes_per_layer == r2.spikes_per_layer);
    CHECK(r1.output_counts == r2.output_counts);
    CHECK(r1.spikes_per_layer[0] == raster.total_events());
}

TEST_CASE("recording a layer captures its spike frames exactly") {
    NetworkTopology topo = parse_topology("8x8-2c3-2a-4o");
    RngStream init(31);
    init_weights(topo, init);
    ForwardPass fwd(topo, LifParams{});

    SpikeRaster raster({1, 8, 8}, 30);
    RngStream rng(32);
    for (auto& e : raster.events) e = rng.bernoulli(0.25) ? 1 : 0;

    SpikeRaster rec;
    WindowResult res = run_window(fwd, raster, 2, &rec);
    CHECK(rec.shape == topo.layer_shape(2));
    CHECK(rec.steps == 30);
    CHECK(rec.total_events() == res.spikes_per_layer[2]);

    SpikeRaster prefix_rec;
    run_prefix_window(fwd, raster, 2, prefix_rec);
    CHECK(prefix_rec.events == rec.events);
}

TEST_CASE("prefix stepping leaves deeper layers untouched") {
    NetworkTopology topo = parse_topology("8x8-2c3-2a-4o");
    RngStream init(41);
    init_weights(topo, init);
    ForwardPass fwd(topo, LifParams{});

    std::vector<std::uint8_t> frame(64, 1);
    fwd.step_prefix(frame.data(), 2);
    const std::vector<double>& out_v = fwd.layer(3).pop.v;
    for (double v : out_v) CHECK(v == 0.0);
}

TEST_CASE("synaptic op counting scales with activity") {
    NetworkTopology topo = parse_topology("8x8-2c3-4o");
    RngStream init(51);
    init_weights(topo, init);
    ForwardPass fwd(topo, LifParams{});

    std::vector<std::uint8_t> silent(64, 0);
    fwd.reset_synaptic_ops();
    fwd.step(silent.data());
    CHECK(fwd.synaptic_ops() == 0);

    std::vector<std::uint8_t> one(64, 0);
    one[3 * 8 + 3] = 1;  // interior spike reaches all 9 kernel offsets of both maps
    fwd.reset();
    fwd.reset_synaptic_ops();
    fwd.step(one.data());
    CHECK(fwd.synaptic_ops() == 2 * 9);
}

TEST_CASE("shape mismatches are rejected") {
    NetworkTopology topo = parse_topology("8x8-2c3-4o");
    RngStream init(61);
    init_weights(topo, init);
    ForwardPass fwd(topo, LifParams{});
    SpikeRaster bad({1, 7, 7}, 10);
    CHECK_THROWS_AS((void)run_window(fwd, bad), ShapeError);
}
