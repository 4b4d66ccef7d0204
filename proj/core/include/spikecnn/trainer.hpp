#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spikecnn/checkpoint.hpp"
#include "spikecnn/config.hpp"
#include "spikecnn/dataset.hpp"
#include "spikecnn/layers.hpp"
#include "spikecnn/metrics.hpp"
#include "spikecnn/readout.hpp"
#include "spikecnn/regen.hpp"
#include "spikecnn/topology.hpp"

namespace spikecnn {

/// One training/evaluation run: settings, the network being trained
/// and where the run has got to. All stochastic behavior flows from
/// cfg.seed through purpose-tagged forks, so two sessions with the
/// same config are bit-for-bit interchangeable.
struct Session {
    TrainConfig cfg;
    NetworkTopology topo;
    ProgressCursor progress;

    RngStream root() const { return RngStream(cfg.seed); }
    Checkpoint to_checkpoint() const;
};

/// Build a session from a config: parse the topology and initialize
/// all weights from the weight-init fork of the root seed.
Session make_session(const TrainConfig& cfg);

/// Restore a session from a checkpoint (the embedded config snapshot
/// is reparsed; weights and progress come from the file).
Session restore_session(const Checkpoint& ck);

/// Train every convolutional layer in sequence on the unlabeled
/// dataset, each layer as a regenerative auto-encoder on the spike
/// trains the frozen prefix feeds it. Each image is presented
/// `cfg.presentations` times back to back with a fresh stimulus
/// encoding per presentation (or, with cfg.interleave_passes, the
/// whole set is swept that many times). One aggregate-loss metrics row
/// is emitted per layer per pass.
///
/// A non-finite loss aborts the run with NumericError after writing an
/// emergency checkpoint next to the configured output directory.
///
/// Returns the aggregate window loss per conv layer per pass; layers
/// skipped because the session had already trained them come back
/// empty.
std::vector<std::vector<double>> train_conv_stack(Session& s, const Dataset& train, MetricsLog* metrics = nullptr);

/// Train the readout on a labeled set against per-label Poisson target
/// trains, features taken from the frozen stack. Emits one loss row
/// per epoch and returns the per-epoch losses.
std::vector<double> train_readout(Session& s, const Dataset& labeled, MetricsLog* metrics = nullptr);

/// Classify one image: `passes` fresh stimulus encodings are run
/// through the whole network and output spike counts are summed.
Decision classify(ForwardPass& fwd, const Image& img, double i_rate_hz, int window_ms, int passes, RngStream& stream);

/// Accuracy of the session's network over a labeled test set.
struct EvalReport {
    double mean_accuracy = 0.0;
    std::vector<double> per_iteration;
    std::vector<std::vector<std::uint64_t>> confusion;  ///< [true][predicted], summed over iterations
};

/// Run the full evaluation protocol: `cfg.iterations` sweeps over the
/// test set, each with its own seed fork, `cfg.passes` presentations
/// per decision. Emits accuracy rows when a log is given.
EvalReport evaluate(const Session& s, const Dataset& test, MetricsLog* metrics = nullptr);

/// Mean spike-count reconstruction error of conv layer `conv_idx` over
/// a probe set: for each image the layer's input window is regenerated
/// through the current kernels without learning, and the per-unit
/// squared count difference is summed. Seeded from the probe fork, so
/// repeated calls measure the same rasters.
double measure_reconstruction_error(const Session& s, int conv_idx, const Dataset& probe);

/// Per-conv-layer sparsity over a probe set, averaged across images.
std::vector<SparsityReport> measure_stack_sparsity(const Session& s, const Dataset& probe);

/// Reconstruction dump of one image through conv layer `conv_idx`:
/// accumulated input spike counts and regenerated spike counts per
/// input channel, plus the raw image. Grids are spike counts (not
/// rescaled); writers rescale.
struct Regeneration {
    std::vector<Grid2D> input_counts;        ///< one per input channel/map
    std::vector<Grid2D> regenerated_counts;  ///< same geometry
};
Regeneration regenerate_image(const Session& s, int conv_idx, const Image& img);

}  // namespace spikecnn
