#include "spikecnn/trainer.hpp"

#include <cmath>

#include "spikecnn/encode.hpp"
#include "spikecnn/errors.hpp"

namespace spikecnn {

namespace {

// Stage tags mixed into the `a` argument of RngStream::fork so the
// encode streams of different training stages never collide: stack
// training of conv layer c uses (c << 40) | image, the readout stage
// and the probe helpers use the high tags below.
constexpr std::uint64_t kReadoutStage = 0xFFull << 40;
constexpr std::uint64_t kSparsityStage = 0xEEull << 40;
constexpr std::uint64_t kRegenStage = 0xDDull << 40;

std::uint64_t stage_tag(int conv_idx, std::size_t image) {
    return (static_cast<std::uint64_t>(conv_idx) << 40) | image;
}

void check_dataset(const Session& s, const Dataset& ds, const char* who) {
    const LayerDescriptor& in = s.topo.layers.front();
    if (ds.images.empty()) throw ValueError(std::string(who) + ": empty dataset");
    if (ds.channels != in.maps || ds.rows != in.rows || ds.cols != in.cols)
        throw DataError(std::string(who) + ": dataset geometry " + std::to_string(ds.channels) + "@" +
                        std::to_string(ds.rows) + "x" + std::to_string(ds.cols) + " does not match input layer " +
                        std::to_string(in.maps) + "@" + std::to_string(in.rows) + "x" + std::to_string(in.cols));
}

void check_labels(const Session& s, const Dataset& ds, const char* who) {
    const int classes = s.topo.layers.back().rows;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] >= classes)
            throw DataError(std::string(who) + ": label " + std::to_string(int(ds.labels[i])) + " at index " +
                            std::to_string(i) + " exceeds " + std::to_string(classes) + " classes");
}

void emergency_checkpoint(const Session& s) noexcept {
    try {
        save_checkpoint(s.cfg.out_dir + "/emergency.ckpt", s.to_checkpoint());
    } catch (...) {
        // Abort reporting must not be masked by a failing rescue write.
    }
}

}  // namespace

Checkpoint Session::to_checkpoint() const {
    Checkpoint ck;
    ck.topology = topo;
    ck.config_json = config_to_json(cfg);
    ck.progress = progress;
    return ck;
}

Session make_session(const TrainConfig& cfg) {
    cfg.validate();
    Session s;
    s.cfg = cfg;
    s.topo = parse_topology(cfg.topology);
    RngStream init = s.root().fork(rng_purpose::weight_init);
    init_weights(s.topo, init, cfg.init_lo, cfg.init_hi, cfg.readout_init_lo, cfg.readout_init_hi);
    return s;
}

Session restore_session(const Checkpoint& ck) {
    Session s;
    s.cfg = parse_config(ck.config_json, "<checkpoint>").config;
    s.topo = ck.topology;
    s.progress = ck.progress;
    if (s.cfg.topology != s.topo.text)
        throw DataError("checkpoint: embedded config topology disagrees with stored weights");
    return s;
}

std::vector<std::vector<double>> train_conv_stack(Session& s, const Dataset& train, MetricsLog* metrics) {
    check_dataset(s, train, "train_conv_stack");
    const std::vector<int> conv_layers = s.topo.conv_layer_indices();
    const RngStream root = s.root();
    const TrainConfig& cfg = s.cfg;
    const int reps = cfg.presentations;
    std::vector<std::vector<double>> all_losses(conv_layers.size());

    for (int c = static_cast<int>(s.progress.stacks_trained); c < static_cast<int>(conv_layers.size()); ++c) {
        const int input_layer = s.topo.conv_input_layer(c);
        const Shape3 in_shape = s.topo.layer_shape(input_layer);
        LayerTrainer lt(s.topo.stacks[static_cast<std::size_t>(c)], in_shape, cfg.lif, cfg.stack);
        ForwardPass fwd(s.topo, cfg.lif);

        std::vector<double> pass_loss(static_cast<std::size_t>(reps), 0.0);
        SpikeRaster features, cached;

        auto present = [&](std::size_t i, int rep) {
            RngStream enc = root.fork(rng_purpose::encode, stage_tag(c, i), static_cast<std::uint64_t>(rep));
            const bool reuse = cfg.cache_features && !cfg.interleave_passes && input_layer > 0 && rep > 0;
            if (!reuse) {
                SpikeRaster raster = poisson_encode(train.images[i], cfg.i_rate_hz, cfg.window_ms, enc);
                if (input_layer == 0)
                    features = std::move(raster);
                else
                    run_prefix_window(fwd, raster, input_layer, features);
                if (cfg.cache_features && !cfg.interleave_passes && input_layer > 0) cached = features;
            } else {
                features = cached;
            }

            RegenWindowStats ws;
            try {
                ws = lt.train_window(features);
            } catch (const NumericError&) {
                emergency_checkpoint(s);
                throw;
            }
            pass_loss[static_cast<std::size_t>(rep)] += ws.loss_sum;
            ++s.progress.presentations;
            if (metrics && cfg.metric_every > 0 && i % static_cast<std::size_t>(cfg.metric_every) == 0)
                metrics->row("stack_window_loss", c, rep, static_cast<int>(i), ws.loss_sum);
        };

        if (cfg.interleave_passes) {
            for (int rep = 0; rep < reps; ++rep)
                for (std::size_t i = 0; i < train.size(); ++i) present(i, rep);
        } else {
            for (std::size_t i = 0; i < train.size(); ++i)
                for (int rep = 0; rep < reps; ++rep) present(i, rep);
        }

        if (metrics)
            for (int rep = 0; rep < reps; ++rep)
                metrics->row("stack_pass_loss", c, rep, -1, pass_loss[static_cast<std::size_t>(rep)]);
        all_losses[static_cast<std::size_t>(c)] = std::move(pass_loss);
        s.progress.stacks_trained = static_cast<std::uint32_t>(c + 1);
    }
    return all_losses;
}

std::vector<double> train_readout(Session& s, const Dataset& labeled, MetricsLog* metrics) {
    check_dataset(s, labeled, "train_readout");
    check_labels(s, labeled, "train_readout");
    const TrainConfig& cfg = s.cfg;
    const RngStream root = s.root();
    const int classes = s.topo.layers.back().rows;
    const int feature_layer = s.topo.feature_layer_index();

    ReadoutTrainer rt(s.topo.readout, cfg.lif, cfg.readout);
    ForwardPass fwd(s.topo, cfg.lif);
    SpikeRaster features;
    std::vector<double> epoch_losses;

    for (int epoch = 0; epoch < cfg.readout_epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            RngStream enc = root.fork(rng_purpose::encode, kReadoutStage | i, static_cast<std::uint64_t>(epoch));
            SpikeRaster raster = poisson_encode(labeled.images[i], cfg.i_rate_hz, cfg.window_ms, enc);
            if (feature_layer == 0)
                features = std::move(raster);
            else
                run_prefix_window(fwd, raster, feature_layer, features);

            RngStream tgt = root.fork(rng_purpose::target, i, static_cast<std::uint64_t>(epoch));
            SpikeRaster target =
                make_target(classes, labeled.labels[i], cfg.window_ms, cfg.readout.target_rate_hz, tgt);
            try {
                epoch_loss += rt.train_window(features, target);
            } catch (const NumericError&) {
                emergency_checkpoint(s);
                throw;
            }
            ++s.progress.presentations;
        }
        if (metrics) metrics->row("readout_pass_loss", -1, epoch, -1, epoch_loss);
        epoch_losses.push_back(epoch_loss);
        ++s.progress.readout_epochs;
    }
    return epoch_losses;
}

Decision classify(ForwardPass& fwd, const Image& img, double i_rate_hz, int window_ms, int passes,
                  RngStream& stream) {
    if (passes <= 0) throw ValueError("classify: passes must be positive");
    std::vector<std::uint64_t> counts;
    for (int p = 0; p < passes; ++p) {
        SpikeRaster raster = poisson_encode(img, i_rate_hz, window_ms, stream);
        WindowResult res = run_window(fwd, raster);
        if (counts.empty()) counts.assign(res.output_counts.size(), 0);
        for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += res.output_counts[j];
    }
    return decide(std::move(counts));
}

EvalReport evaluate(const Session& s, const Dataset& test, MetricsLog* metrics) {
    check_dataset(s, test, "evaluate");
    check_labels(s, test, "evaluate");
    const TrainConfig& cfg = s.cfg;
    const RngStream root = s.root();
    const int classes = s.topo.layers.back().rows;
    const std::size_t n = test.size();

    EvalReport rep;
    rep.confusion.assign(static_cast<std::size_t>(classes), std::vector<std::uint64_t>(classes, 0));

    std::vector<int> predicted(n, -1);
    for (int it = 0; it < cfg.iterations; ++it) {
        // Test items are independent: each gets a private network clone
        // and its own seed fork, so the sweep can fan out over threads
        // without changing a single decision.
#pragma omp parallel
        {
            ForwardPass local(s.topo, cfg.lif);
#pragma omp for schedule(dynamic, 4)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
                RngStream stream = root.fork(rng_purpose::eval, static_cast<std::uint64_t>(it),
                                             static_cast<std::uint64_t>(i));
                predicted[static_cast<std::size_t>(i)] =
                    classify(local, test.images[static_cast<std::size_t>(i)], cfg.i_rate_hz, cfg.window_ms,
                             cfg.passes, stream)
                        .label;
            }
        }

        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const int truth = test.labels[i];
            ++rep.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted[i])];
            if (predicted[i] == truth) ++correct;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(n);
        rep.per_iteration.push_back(acc);
        if (metrics) metrics->row("eval_accuracy", -1, -1, it, acc);
    }

    for (double a : rep.per_iteration) rep.mean_accuracy += a;
    rep.mean_accuracy /= static_cast<double>(rep.per_iteration.size());
    if (metrics) metrics->row("eval_mean", -1, -1, -1, rep.mean_accuracy);
    return rep;
}

double measure_reconstruction_error(const Session& s, int conv_idx, const Dataset& probe) {
    check_dataset(s, probe, "measure_reconstruction_error");
    const TrainConfig& cfg = s.cfg;
    const RngStream root = s.root();
    const int input_layer = s.topo.conv_input_layer(conv_idx);
    const Shape3 in_shape = s.topo.layer_shape(input_layer);

    // Observation never updates weights; a private copy keeps the
    // session const without aliasing tricks.
    KernelStack stack = s.topo.stacks[static_cast<std::size_t>(conv_idx)];
    LayerTrainer lt(stack, in_shape, cfg.lif, cfg.stack);
    ForwardPass fwd(s.topo, cfg.lif);

    double total = 0.0;
    SpikeRaster features, regen;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        RngStream enc = root.fork(rng_purpose::probe, stage_tag(conv_idx, i), 0);
        SpikeRaster raster = poisson_encode(probe.images[i], cfg.i_rate_hz, cfg.window_ms, enc);
        if (input_layer == 0)
            features = std::move(raster);
        else
            run_prefix_window(fwd, raster, input_layer, features);
        lt.observe_window(features, &regen);
        total += window_count_error(features, regen);
    }
    return total / static_cast<double>(probe.size());
}

std::vector<SparsityReport> measure_stack_sparsity(const Session& s, const Dataset& probe) {
    check_dataset(s, probe, "measure_stack_sparsity");
    const TrainConfig& cfg = s.cfg;
    const RngStream root = s.root();
    const std::vector<int> conv_layers = s.topo.conv_layer_indices();
    if (conv_layers.empty()) return {};

    ForwardPass fwd(s.topo, cfg.lif);
    const int last_conv = conv_layers.back();

    std::vector<SparsityReport> acc(conv_layers.size());
    std::vector<SpikeRaster> rasters(conv_layers.size());

    for (std::size_t i = 0; i < probe.size(); ++i) {
        RngStream enc = root.fork(rng_purpose::probe, kSparsityStage | i, 0);
        SpikeRaster raster = poisson_encode(probe.images[i], cfg.i_rate_hz, cfg.window_ms, enc);
        for (std::size_t c = 0; c < conv_layers.size(); ++c)
            rasters[c] = SpikeRaster(s.topo.layer_shape(conv_layers[c]), raster.steps);

        fwd.reset();
        for (int t = 0; t < raster.steps; ++t) {
            fwd.step_prefix(raster.frame_data(t), last_conv);
            for (std::size_t c = 0; c < conv_layers.size(); ++c)
                rasters[c].store_frame(t, fwd.layer(conv_layers[c]).spikes.data());
        }
        for (std::size_t c = 0; c < conv_layers.size(); ++c) {
            SparsityReport r = measure_sparsity(rasters[c]);
            acc[c].active_fraction += r.active_fraction;
            acc[c].mean_rate_hz += r.mean_rate_hz;
        }
    }
    for (SparsityReport& r : acc) {
        r.active_fraction /= static_cast<double>(probe.size());
        r.mean_rate_hz /= static_cast<double>(probe.size());
    }
    return acc;
}

Regeneration regenerate_image(const Session& s, int conv_idx, const Image& img) {
    const TrainConfig& cfg = s.cfg;
    const RngStream root = s.root();
    const int input_layer = s.topo.conv_input_layer(conv_idx);
    const Shape3 in_shape = s.topo.layer_shape(input_layer);
    if (img.channels != s.topo.layers.front().maps || img.rows != s.topo.layers.front().rows ||
        img.cols != s.topo.layers.front().cols)
        throw DataError("regenerate_image: image does not match the input layer");

    KernelStack stack = s.topo.stacks[static_cast<std::size_t>(conv_idx)];
    LayerTrainer lt(stack, in_shape, cfg.lif, cfg.stack);
    ForwardPass fwd(s.topo, cfg.lif);

    RngStream enc = root.fork(rng_purpose::probe, kRegenStage | static_cast<std::uint64_t>(conv_idx), 0);
    SpikeRaster raster = poisson_encode(img, cfg.i_rate_hz, cfg.window_ms, enc);
    SpikeRaster features;
    if (input_layer == 0)
        features = std::move(raster);
    else
        run_prefix_window(fwd, raster, input_layer, features);

    SpikeRaster regen;
    lt.observe_window(features, &regen);

    auto counts_to_grids = [](const SpikeRaster& r) {
        std::vector<Grid2D> grids;
        std::vector<std::uint64_t> counts(r.shape.count(), 0);
        for (int t = 0; t < r.steps; ++t) {
            const std::uint8_t* f = r.frame_data(t);
            for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += f[i];
        }
        const std::size_t per_map = static_cast<std::size_t>(r.shape.rows) * r.shape.cols;
        for (int m = 0; m < r.shape.maps; ++m) {
            Grid2D g(r.shape.rows, r.shape.cols);
            for (std::size_t i = 0; i < per_map; ++i) g.v[i] = static_cast<double>(counts[m * per_map + i]);
            grids.push_back(std::move(g));
        }
        return grids;
    };

    Regeneration out;
    out.input_counts = counts_to_grids(features);
    out.regenerated_counts = counts_to_grids(regen);
    return out;
}

}  // namespace spikecnn
