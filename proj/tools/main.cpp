// Command-line front end: batch training, evaluation and artifact
// dumps driven by a JSON config plus flag overrides (flags win).
//
// Exit codes: 0 success, 2 configuration or usage, 3 malformed data,
// 4 numeric abort, 5 I/O failure, 1 anything else.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikecnn/checkpoint.hpp"
#include "spikecnn/config.hpp"
#include "spikecnn/dataset.hpp"
#include "spikecnn/errors.hpp"
#include "spikecnn/metrics.hpp"
#include "spikecnn/synth.hpp"
#include "spikecnn/trainer.hpp"

namespace fs = std::filesystem;
using namespace spikecnn;

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Flags shared by the training/evaluation subcommands. Optionals stay
/// empty unless given, so config values survive when a flag is absent.
struct CommonFlags {
    std::string config_path;
    std::string checkpoint_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> subset;
    std::optional<int> passes;
    std::optional<int> iterations;
};

void add_session_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON settings file");
    cmd->add_option("--checkpoint", f.checkpoint_path, "saved training state to load");
    cmd->add_option("--seed", f.seed, "override the root seed");
    cmd->add_option("--out", f.out_dir, "override the output directory");
}

void note_defaults(const LoadedConfig& lc) {
    if (lc.defaulted.empty()) return;
    std::string keys;
    for (const std::string& k : lc.defaulted) {
        if (!keys.empty()) keys += ", ";
        keys += k;
    }
    std::fprintf(stderr, "note: defaulted config keys: %s\n", keys.c_str());
}

void apply_overrides(TrainConfig& cfg, const CommonFlags& f) {
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.passes) cfg.passes = *f.passes;
    if (f.iterations) cfg.iterations = *f.iterations;
}

/// Build the session this command operates on. A checkpoint, when
/// given, supplies weights, progress and a config snapshot; a config
/// file on top of it replaces the settings (same topology required).
Session session_from_flags(const CommonFlags& f) {
    if (!f.checkpoint_path.empty()) {
        Session s = restore_session(load_checkpoint(f.checkpoint_path));
        if (!f.config_path.empty()) {
            LoadedConfig lc = load_config(f.config_path);
            note_defaults(lc);
            if (lc.config.topology != s.cfg.topology)
                throw ConfigError("config topology \"" + lc.config.topology +
                                  "\" does not match the checkpoint's \"" + s.cfg.topology + "\"");
            s.cfg = lc.config;
        }
        apply_overrides(s.cfg, f);
        s.cfg.validate();
        return s;
    }
    if (f.config_path.empty())
        throw ConfigError("pass --config to start a run or --checkpoint to load one");
    LoadedConfig lc = load_config(f.config_path);
    note_defaults(lc);
    apply_overrides(lc.config, f);
    return make_session(lc.config);
}

void require_checkpoint(const CommonFlags& f, const char* cmd) {
    if (f.checkpoint_path.empty())
        throw ConfigError(std::string(cmd) + " needs --checkpoint (train-stack writes one)");
}

/// Load the train or test split named by the config. IDX wants an
/// image/label pair; the CIFAR-10 binary format concatenates batches.
Dataset load_split(const TrainConfig& cfg, bool train) {
    const char* which = train ? "train" : "test";
    if (cfg.data_format == "idx") {
        const std::string& imgs = train ? cfg.train_images : cfg.test_images;
        const std::string& labs = train ? cfg.train_labels : cfg.test_labels;
        if (imgs.empty() || labs.empty())
            throw ConfigError(std::string("no ") + which + " dataset in the config: set data." +
                              which + "_images and data." + which + "_labels");
        return load_idx_pair(imgs, labs);
    }
    const std::vector<std::string>& batches = train ? cfg.train_batches : cfg.test_batches;
    if (batches.empty())
        throw ConfigError(std::string("no ") + which + " dataset in the config: set data." + which +
                          "_batches");
    Dataset all;
    for (const std::string& path : batches) {
        Dataset b = read_cifar10_batch(path);
        if (all.images.empty()) {
            all = std::move(b);
            continue;
        }
        const Image& want = all.images.front();
        const Image& got = b.images.front();
        if (got.channels != want.channels || got.rows != want.rows || got.cols != want.cols)
            throw DataError(path + ": geometry differs from the first batch");
        all.images.insert(all.images.end(), b.images.begin(), b.images.end());
        all.labels.insert(all.labels.end(), b.labels.begin(), b.labels.end());
    }
    return all;
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string out_path(const TrainConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void write_session_checkpoint(const Session& s) {
    const std::string path = out_path(s.cfg, "checkpoint.ckpt");
    save_checkpoint(path, s.to_checkpoint());
    std::printf("checkpoint: %s\n", path.c_str());
}

// Distinct shuffle forks so the three subset draws never reuse a
// stream: readout labels, unlabeled stack subset, test subset.
RngStream subset_stream(const Session& s, std::uint64_t which) {
    return s.root().fork(rng_purpose::shuffle, which, 0);
}

int cmd_train_stack(const CommonFlags& f) {
    Session s = session_from_flags(f);
    Dataset train = load_split(s.cfg, true);
    if (f.subset) {
        if (*f.subset == 0) throw ValueError("--subset must be positive (omit it to use the whole set)");
        RngStream shuffle = subset_stream(s, 1);
        train = take_subset(train, *f.subset, shuffle);
    }
    std::printf("topology %s, %zu unlabeled images, %d presentation%s per image\n", s.cfg.topology.c_str(),
                train.size(), s.cfg.presentations, s.cfg.presentations == 1 ? "" : "s");

    make_out_dir(s.cfg.out_dir);
    MetricsLog log(out_path(s.cfg, "metrics-stack.csv"));
    const std::vector<std::vector<double>> losses = train_conv_stack(s, train, &log);
    for (std::size_t c = 0; c < losses.size(); ++c) {
        if (losses[c].empty()) {
            std::printf("conv layer %zu: already trained, skipped\n", c);
            continue;
        }
        for (std::size_t p = 0; p < losses[c].size(); ++p)
            std::printf("conv layer %zu pass %zu: aggregate loss %s\n", c, p, fmt_g(losses[c][p]).c_str());
    }
    write_session_checkpoint(s);
    return 0;
}

int cmd_train_readout(const CommonFlags& f) {
    require_checkpoint(f, "train-readout");
    Session s = session_from_flags(f);
    Dataset labeled = load_split(s.cfg, true);
    if (f.subset) {
        if (*f.subset == 0) throw ValueError("--subset must be positive (omit it to use the whole set)");
        s.cfg.subset = *f.subset;
    }
    if (s.cfg.subset > 0) {
        RngStream shuffle = subset_stream(s, 0);
        labeled = take_subset(labeled, s.cfg.subset, shuffle);
    }
    std::printf("readout on %zu labeled images, %d epoch%s\n", labeled.size(), s.cfg.readout_epochs,
                s.cfg.readout_epochs == 1 ? "" : "s");

    make_out_dir(s.cfg.out_dir);
    MetricsLog log(out_path(s.cfg, "metrics-readout.csv"));
    const std::vector<double> losses = train_readout(s, labeled, &log);
    for (std::size_t e = 0; e < losses.size(); ++e)
        std::printf("epoch %zu: aggregate loss %s\n", e, fmt_g(losses[e]).c_str());
    write_session_checkpoint(s);
    return 0;
}

int cmd_eval(const CommonFlags& f) {
    require_checkpoint(f, "eval");
    Session s = session_from_flags(f);
    Dataset test = load_split(s.cfg, false);
    if (f.subset) {
        if (*f.subset == 0) throw ValueError("--subset must be positive (omit it to use the whole set)");
        RngStream shuffle = subset_stream(s, 2);
        test = take_subset(test, *f.subset, shuffle);
    }

    make_out_dir(s.cfg.out_dir);
    MetricsLog log(out_path(s.cfg, "metrics-eval.csv"));
    const EvalReport rep = evaluate(s, test, &log);

    std::printf("mean accuracy over %d iteration%s of %zu images: %.4f\n", s.cfg.iterations,
                s.cfg.iterations == 1 ? "" : "s", test.size(), rep.mean_accuracy);
    for (std::size_t it = 0; it < rep.per_iteration.size(); ++it)
        std::printf("iteration %zu: %.4f\n", it, rep.per_iteration[it]);

    std::printf("confusion matrix (row = true label, column = prediction):\n");
    const int classes = static_cast<int>(rep.confusion.size());
    std::printf("     ");
    for (int j = 0; j < classes; ++j) std::printf("%7d", j);
    std::printf("\n");
    for (int i = 0; i < classes; ++i) {
        std::printf("  %2d ", i);
        for (int j = 0; j < classes; ++j)
            std::printf("%7llu", static_cast<unsigned long long>(rep.confusion[i][j]));
        std::printf("\n");
    }
    return 0;
}

Image image_from_pgm(const std::string& path) {
    const Grid2D g = read_pgm(path);
    Image img(1, g.rows, g.cols);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            img.set(0, r, c, static_cast<std::uint8_t>(std::clamp(g.at(r, c), 0.0, 255.0) + 0.5));
    return img;
}

int cmd_reconstruct(const CommonFlags& f, std::size_t index, const std::string& image_path, int layer) {
    require_checkpoint(f, "reconstruct");
    Session s = session_from_flags(f);
    const int conv_layers = static_cast<int>(s.topo.stacks.size());
    if (layer < 0 || layer >= conv_layers)
        throw ValueError("--layer out of range: the network has " + std::to_string(conv_layers) +
                         " conv layers");
    if (static_cast<int>(s.progress.stacks_trained) <= layer)
        throw ValueError("conv layer " + std::to_string(layer) + " has not been trained yet (" +
                         std::to_string(s.progress.stacks_trained) + " trained so far)");

    Image img;
    if (!image_path.empty()) {
        img = image_from_pgm(image_path);
    } else {
        Dataset test = load_split(s.cfg, false);
        if (index >= test.size())
            throw ValueError("--index out of range: the test set has " + std::to_string(test.size()) +
                             " images");
        img = test.images[index];
    }

    const Regeneration rec = regenerate_image(s, layer, img);
    make_out_dir(s.cfg.out_dir);
    for (int ch = 0; ch < img.channels; ++ch) {
        const std::string suffix = "-c" + std::to_string(ch) + ".pgm";
        const std::string orig = out_path(s.cfg, "original" + suffix);
        const std::string spikes = out_path(s.cfg, "input-spikes" + suffix);
        const std::string regen = out_path(s.cfg, "regenerated" + suffix);
        write_pgm(orig, img, ch);
        write_pgm(spikes, rec.input_counts[static_cast<std::size_t>(ch)]);
        write_pgm(regen, rec.regenerated_counts[static_cast<std::size_t>(ch)]);
        std::printf("channel %d: %s %s %s\n", ch, orig.c_str(), spikes.c_str(), regen.c_str());
    }
    return 0;
}

struct WeightStats {
    double lo = 0.0, hi = 0.0, mean = 0.0, stddev = 0.0;
};

WeightStats weight_stats(const std::vector<double>& w) {
    WeightStats st;
    if (w.empty()) return st;
    st.lo = *std::min_element(w.begin(), w.end());
    st.hi = *std::max_element(w.begin(), w.end());
    double sum = 0.0;
    for (double v : w) sum += v;
    st.mean = sum / static_cast<double>(w.size());
    double sq = 0.0;
    for (double v : w) sq += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(sq / static_cast<double>(w.size()));
    return st;
}

void print_stats(const char* label, const std::vector<double>& w) {
    const WeightStats st = weight_stats(w);
    std::printf("%s: min %s  max %s  mean %s  std %s\n", label, fmt_g(st.lo).c_str(), fmt_g(st.hi).c_str(),
                fmt_g(st.mean).c_str(), fmt_g(st.stddev).c_str());
}

/// All kernels of one conv layer tiled into a single grid, out maps
/// down, in maps across, one separator pixel between cells. Shifted so
/// the layer minimum maps to black.
Grid2D kernel_montage(const KernelStack& st) {
    const int cell_h = st.kh + 1;
    const int cell_w = st.kw + 1;
    const double lo = *std::min_element(st.w.begin(), st.w.end());
    Grid2D m(st.out_maps * cell_h - 1, st.in_maps * cell_w - 1, 0.0);
    for (int k = 0; k < st.out_maps; ++k)
        for (int l = 0; l < st.in_maps; ++l)
            for (int a = 0; a < st.kh; ++a)
                for (int b = 0; b < st.kw; ++b)
                    m.at(k * cell_h + a, l * cell_w + b) = st.at(k, l, a, b) - lo;
    return m;
}

int cmd_inspect(const CommonFlags& f, std::size_t index, const std::string& kernels_dir) {
    require_checkpoint(f, "inspect");
    Session s = session_from_flags(f);

    std::printf("topology: %s\n", s.cfg.topology.c_str());
    std::printf("progress: %u conv layers trained, %u readout epochs, %llu presentations\n",
                s.progress.stacks_trained, s.progress.readout_epochs,
                static_cast<unsigned long long>(s.progress.presentations));

    for (std::size_t c = 0; c < s.topo.stacks.size(); ++c) {
        const KernelStack& st = s.topo.stacks[c];
        char label[96];
        std::snprintf(label, sizeof label, "conv layer %zu (%dx%dx%dx%d)", c, st.out_maps, st.in_maps,
                      st.kh, st.kw);
        print_stats(label, st.w);
    }
    {
        char label[96];
        std::snprintf(label, sizeof label, "readout (%dx%d)", s.topo.readout.rows, s.topo.readout.cols);
        print_stats(label, s.topo.readout.w);
    }

    // Probe sparsity: run one stimulus through the frozen stack. Use a
    // test image when the config points at one; otherwise synthesize a
    // glyph if the input geometry allows it.
    Dataset probe;
    std::string probe_desc;
    try {
        Dataset test = load_split(s.cfg, false);
        if (index >= test.size())
            throw ValueError("--index out of range: the test set has " + std::to_string(test.size()) +
                             " images");
        probe.images.push_back(test.images[index]);
        probe.labels.push_back(test.labels[index]);
        probe_desc = "test image " + std::to_string(index);
    } catch (const ConfigError&) {
        // no dataset configured; fall through to the synthetic probe
    } catch (const IoError&) {
        // dataset files not present; fall through to the synthetic probe
    }
    if (probe.images.empty()) {
        const LayerDescriptor& in = s.topo.layers.front();
        if (in.maps == 1 && in.rows == in.cols && in.rows >= 8) {
            RngStream rng = s.root().fork(rng_purpose::probe, 0xCAFEull << 40, index);
            const int digit = static_cast<int>(index % 10);
            probe.images.push_back(synth_digit(digit, in.rows, rng));
            probe.labels.push_back(static_cast<std::uint8_t>(digit));
            probe_desc = "synthetic digit " + std::to_string(digit);
        }
    }
    if (probe.images.empty()) {
        std::printf("probe sparsity: skipped (no test dataset configured)\n");
    } else {
        probe.channels = probe.images.front().channels;
        probe.rows = probe.images.front().rows;
        probe.cols = probe.images.front().cols;
        const std::vector<SparsityReport> reps = measure_stack_sparsity(s, probe);
        for (std::size_t c = 0; c < reps.size(); ++c)
            std::printf("conv layer %zu sparsity on %s: active fraction %.4f, mean rate %.2f Hz\n", c,
                        probe_desc.c_str(), reps[c].active_fraction, reps[c].mean_rate_hz);
    }

    if (!kernels_dir.empty()) {
        make_out_dir(kernels_dir);
        for (std::size_t c = 0; c < s.topo.stacks.size(); ++c) {
            const std::string path =
                (fs::path(kernels_dir) / ("kernels-layer" + std::to_string(c) + ".pgm")).string();
            write_pgm(path, kernel_montage(s.topo.stacks[c]));
            std::printf("kernels: %s\n", path.c_str());
        }
    }
    return 0;
}

int cmd_mkdata(const std::string& out, std::size_t train_n, std::size_t test_n, int side,
               std::uint64_t seed) {
    if (train_n == 0 || test_n == 0) throw ValueError("mkdata: --train and --test must be positive");
    make_out_dir(out);
    RngStream rng(seed);
    const Dataset train = synth_digit_set(train_n, side, rng);
    const Dataset test = synth_digit_set(test_n, side, rng);

    const fs::path dir(out);
    write_idx_images((dir / "train-images-idx3-ubyte").string(), train.images);
    write_idx_labels((dir / "train-labels-idx1-ubyte").string(), train.labels);
    write_idx_images((dir / "test-images-idx3-ubyte").string(), test.images);
    write_idx_labels((dir / "test-labels-idx1-ubyte").string(), test.labels);
    std::printf("wrote %zu train and %zu test synthetic digits (%dx%d) to %s\n", train_n, test_n, side,
                side, out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-driven spiking convolutional network: layer-wise regenerative training,"
                 " spike-target readout, evaluation and artifact dumps."};
    app.require_subcommand(1);

    CommonFlags ts_flags;
    CLI::App* ts = app.add_subcommand("train-stack", "Train the convolutional layers unsupervised");
    add_session_flags(ts, ts_flags);
    ts->add_option("--subset", ts_flags.subset, "train on this many images (deterministic draw)");

    CommonFlags tr_flags;
    CLI::App* tr = app.add_subcommand("train-readout", "Train the classifier readout on labels");
    add_session_flags(tr, tr_flags);
    tr->add_option("--subset", tr_flags.subset, "labeled subset size (overrides readout.subset)");

    CommonFlags ev_flags;
    CLI::App* ev = app.add_subcommand("eval", "Measure test-set accuracy");
    add_session_flags(ev, ev_flags);
    ev->add_option("--subset", ev_flags.subset, "evaluate on this many test images");
    ev->add_option("--passes", ev_flags.passes, "fresh presentations summed per decision");
    ev->add_option("--iterations", ev_flags.iterations, "test-set sweeps averaged in the report");

    CommonFlags rc_flags;
    std::size_t rc_index = 0;
    std::string rc_image;
    int rc_layer = 0;
    CLI::App* rc = app.add_subcommand("reconstruct",
                                      "Dump original / input-spike / regenerated images for one stimulus");
    add_session_flags(rc, rc_flags);
    rc->add_option("--index", rc_index, "test-set image to reconstruct");
    rc->add_option("--image", rc_image, "reconstruct this PGM file instead of a test image");
    rc->add_option("--layer", rc_layer, "conv layer to regenerate through");

    CommonFlags in_flags;
    std::size_t in_index = 0;
    std::string in_kernels;
    CLI::App* in = app.add_subcommand("inspect", "Print topology, weight statistics and probe sparsity");
    add_session_flags(in, in_flags);
    in->add_option("--index", in_index, "test-set image to probe");
    in->add_option("--kernels", in_kernels, "also dump kernel montages into this directory");

    std::string mk_out;
    std::size_t mk_train = 2000, mk_test = 500;
    int mk_side = 28;
    std::uint64_t mk_seed = 1;
    CLI::App* mk = app.add_subcommand("mkdata", "Write synthetic digit IDX files for demos and tests");
    mk->add_option("--out", mk_out, "directory for the four IDX files")->required();
    mk->add_option("--train", mk_train, "training images to generate");
    mk->add_option("--test", mk_test, "test images to generate");
    mk->add_option("--side", mk_side, "image side length");
    mk->add_option("--seed", mk_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc_code = app.exit(e);
        return rc_code == 0 ? 0 : 2;
    }

    try {
        if (ts->parsed()) return cmd_train_stack(ts_flags);
        if (tr->parsed()) return cmd_train_readout(tr_flags);
        if (ev->parsed()) return cmd_eval(ev_flags);
        if (rc->parsed()) return cmd_reconstruct(rc_flags, rc_index, rc_image, rc_layer);
        if (in->parsed()) return cmd_inspect(in_flags, in_index, in_kernels);
        if (mk->parsed()) return cmd_mkdata(mk_out, mk_train, mk_test, mk_side, mk_seed);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ValueError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric abort: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
