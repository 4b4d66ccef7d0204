#include "doctest.h"
#include "spikecnn/errors.hpp"
#include "spikecnn/readout.hpp"

#include <cmath>

using namespace spikecnn;

TEST_CASE("target raster drives only the labeled unit") {
    RngStream rng(201);
    SpikeRaster t = make_target(10, 3, 250, 30.0, rng);
    CHECK(t.shape == Shape3{10, 1, 1});
    CHECK(t.steps == 250);

    std::vector<std::uint64_t> per_map = t.events_per_map();
    for (int m = 0; m < 10; ++m) {
        if (m == 3) continue;
        CHECK(per_map[m] == 0);
    }
    // Expected count 250 * 0.03 = 7.5, sd = sqrt(250 * 0.03 * 0.97) = 2.7.
    CHECK(per_map[3] > 0);
    CHECK(per_map[3] < 30);
}

TEST_CASE("target spike counts follow the requested rate") {
    RngStream rng(202);
    double total = 0.0;
    const int reps = 400;
    for (int i = 0; i < reps; ++i) {
        SpikeRaster t = make_target(10, 7, 250, 30.0, rng);
        total += static_cast<double>(t.events_per_map()[7]);
    }
    const double mean = total / reps;
    const double se = std::sqrt(250 * 0.03 * 0.97 / reps);
    CHECK(std::abs(mean - 7.5) < 4.0 * se);
}

TEST_CASE("target construction rejects bad arguments") {
    RngStream rng(203);
    CHECK_THROWS_AS(make_target(10, 10, 250, 30.0, rng), ValueError);
    CHECK_THROWS_AS(make_target(10, -1, 250, 30.0, rng), ValueError);
    CHECK_THROWS_AS(make_target(10, 0, 250, 1500.0, rng), ValueError);
    CHECK_THROWS_AS(make_target(0, 0, 250, 30.0, rng), ValueError);
    CHECK_THROWS_AS(make_target(10, 0, 0, 30.0, rng), ValueError);
}

TEST_CASE("one training step applies the potential-gated delta rule") {
    // Two classes, three features. Pick weights so class 0's membrane
    // lands at 0.4 after one step with features {0, 2} active.
    DenseMatrix w(2, 3);
    w.at(0, 0) = 4.0;
    w.at(0, 2) = 4.0;  // J_0 = 8, v_0 = 0.05 * 8 = 0.4
    w.at(1, 1) = 2.0;  // silent feature, J_1 = 0

    LifParams params;  // v_th = 1.2, v_res = 0
    ReadoutConfig cfg;
    cfg.eta = 0.005;
    ReadoutTrainer tr(w, params, cfg);

    std::vector<std::uint8_t> feat{1, 0, 1};
    std::vector<std::uint8_t> target{1, 0};  // class 0 should fire, class 1 stay silent

    const double loss = tr.train_step(feat.data(), target.data());

    // delta_0 = (1.2 - 0.4) * 0.4 = 0.32 -> dw = eta * 0.32 = 0.0016 on
    // active synapses only.
    CHECK(w.at(0, 0) == doctest::Approx(4.0016));
    CHECK(w.at(0, 2) == doctest::Approx(4.0016));
    CHECK(w.at(0, 1) == 0.0);
    // Class 1 never charged, so its delta is gated to zero.
    CHECK(w.at(1, 1) == 2.0);
    // loss = ((1.2 - 0.4)^2 + 0) / (2 * 2)
    CHECK(loss == doctest::Approx(0.64 / 4.0));
}

TEST_CASE("wrong-class firing is depressed at the spike itself") {
    DenseMatrix w(2, 1);
    w.at(0, 0) = 30.0;  // v_0 = 1.5 after one step: crosses threshold
    w.at(1, 0) = 6.0;   // v_1 = 0.3

    ReadoutTrainer tr(w, LifParams{}, ReadoutConfig{});
    std::vector<std::uint8_t> feat{1};
    std::vector<std::uint8_t> target{0, 1};  // class 1 is correct

    tr.train_step(feat.data(), target.data());
    // Class 0 fired without a target: delta = (0 - 1.5) * 1.5, taken at
    // the pre-reset potential.
    CHECK(w.at(0, 0) == doctest::Approx(30.0 + 0.005 * (0.0 - 1.5) * 1.5));
    // Class 1 has a target spike: delta = (1.2 - 0.3) * 0.3.
    CHECK(w.at(1, 0) == doctest::Approx(6.0 + 0.005 * (1.2 - 0.3) * 0.3));
}

TEST_CASE("a merely charged unit sits out the step unless gating is off") {
    // Class 0 is driven to 0.5 but neither fires nor has a target
    // spike. With event gating (the default) its row holds; with the
    // error live at every step the same situation is depressed.
    std::vector<std::uint8_t> feat{1};
    std::vector<std::uint8_t> target{0, 1};

    DenseMatrix held(2, 1);
    held.at(0, 0) = 10.0;  // v_0 = 0.5, subthreshold
    held.at(1, 0) = 6.0;
    ReadoutTrainer gated(held, LifParams{}, ReadoutConfig{});
    gated.train_step(feat.data(), target.data());
    CHECK(held.at(0, 0) == 10.0);
    CHECK(held.at(1, 0) == doctest::Approx(6.0 + 0.005 * (1.2 - 0.3) * 0.3));

    DenseMatrix moved(2, 1);
    moved.at(0, 0) = 10.0;
    moved.at(1, 0) = 6.0;
    ReadoutConfig open;
    open.event_gated = false;
    ReadoutTrainer ungated(moved, LifParams{}, open);
    ungated.train_step(feat.data(), target.data());
    CHECK(moved.at(0, 0) == doctest::Approx(10.0 + 0.005 * (0.0 - 0.5) * 0.5));
    CHECK(moved.at(1, 0) == doctest::Approx(6.0 + 0.005 * (1.2 - 0.3) * 0.3));
}

TEST_CASE("silent features leave the matrix untouched") {
    DenseMatrix w(3, 4);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 4; ++i) w.at(j, i) = 0.1 * (j + 1) + 0.01 * i;
    std::vector<double> before = w.w;

    ReadoutTrainer tr(w, LifParams{}, ReadoutConfig{});
    std::vector<std::uint8_t> feat{0, 0, 0, 0};
    std::vector<std::uint8_t> target{1, 0, 0};
    const double loss = tr.train_step(feat.data(), target.data());
    CHECK(w.w == before);  // updates are potential-gated, so nothing moves
    // The miss itself is still reported: class 0 sits at rest but should
    // be at threshold, so loss = v_th^2 / (2 * classes).
    CHECK(loss == doctest::Approx(1.2 * 1.2 / 6.0));
}

TEST_CASE("training a window accumulates loss and resets membranes first") {
    DenseMatrix w(2, 2);
    w.at(0, 0) = 5.0;
    w.at(1, 1) = 5.0;

    ReadoutTrainer tr(w, LifParams{}, ReadoutConfig{});
    SpikeRaster feats({2, 1, 1}, 10);
    SpikeRaster target({2, 1, 1}, 10);
    for (int t = 0; t < 10; ++t) feats.set(0, 0, 0, t, true);
    for (int t = 0; t < 10; ++t) target.set(0, 0, 0, t, true);

    const double l1 = tr.train_window(feats, target);
    CHECK(l1 > 0.0);

    DenseMatrix w2(2, 2);
    w2.at(0, 0) = 5.0;
    w2.at(1, 1) = 5.0;
    ReadoutTrainer tr2(w2, LifParams{}, ReadoutConfig{});
    // Pre-charge tr2 with a junk step, then train the same window; the
    // reset inside train_window must make the outcomes identical.
    std::vector<std::uint8_t> feat{1, 1};
    std::vector<std::uint8_t> tgt{1, 1};
    tr2.train_step(feat.data(), tgt.data());
    for (std::size_t i = 0; i < w2.w.size(); ++i) w2.w[i] = (i == 0 || i == 3) ? 5.0 : 0.0;
    const double l2 = tr2.train_window(feats, target);
    CHECK(l1 == doctest::Approx(l2));
}

TEST_CASE("window training validates shapes") {
    DenseMatrix w(2, 3);
    ReadoutTrainer tr(w, LifParams{}, ReadoutConfig{});
    SpikeRaster feats({1, 1, 3}, 10);
    SpikeRaster bad_target({2, 1, 1}, 9);
    SpikeRaster target({2, 1, 1}, 10);
    CHECK_NOTHROW((void)tr.train_window(feats, target));
    CHECK_THROWS_AS((void)tr.train_window(feats, bad_target), ShapeError);
    SpikeRaster bad_feats({1, 1, 4}, 10);
    CHECK_THROWS_AS((void)tr.train_window(bad_feats, target), ShapeError);
}

TEST_CASE("config validation") {
    ReadoutConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.eta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValueError);
    cfg.eta = 0.005;
    cfg.target_rate_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValueError);
    cfg.target_rate_hz = 1001.0;
    CHECK_THROWS_AS(cfg.validate(), ValueError);
}

TEST_CASE("decisions take the argmax with ties to the lowest index") {
    CHECK(decide({1, 5, 3}).label == 1);
    CHECK(decide({7, 5, 7}).label == 0);
    CHECK(decide({0, 0, 0}).label == 0);
    CHECK(decide({0, 2, 9, 9}).label == 2);
    Decision d = decide({4, 8});
    CHECK(d.spike_counts == std::vector<std::uint64_t>{4, 8});
    CHECK_THROWS_AS(decide({}), ValueError);
}
