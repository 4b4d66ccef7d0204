#pragma once

#include <cstdint>
#include <vector>

#include "spikecnn/lif.hpp"
#include "spikecnn/raster.hpp"
#include "spikecnn/rng.hpp"
#include "spikecnn/topology.hpp"

namespace spikecnn {

/// Settings of the supervised readout stage.
struct ReadoutConfig {
    double eta = 0.005;            ///< learning rate for the readout matrix
    double target_rate_hz = 30.0;  ///< firing rate requested from the labeled class unit
    bool event_gated = true;       ///< update a unit's row only at steps where its target
                                   ///< train or the unit itself spiked; false updates at
                                   ///< every step
    void validate() const;
};

/// Build the spike-target raster for one presentation: the unit of the
/// labeled class receives an independent Poisson train at
/// `target_rate_hz`, every other unit is asked to stay silent.
SpikeRaster make_target(int classes, int label, int window_ms, double target_rate_hz, RngStream& rng);

/// Trains the fully connected readout with the potential-gated delta
/// rule. Each step drives the output population with current W * s(t)
/// and nudges W so the integrated potentials track the spike-aligned
/// target:
///
///   v_des_j  = v_th where the target spiked, v_res elsewhere
///   delta_j  = (v_des_j - v_j) * v_j
///   W[j,i]  += eta * delta_j * s_i
///
/// Units firing for the wrong class see v_des = v_res and therefore
/// depress exactly the synapses that drove them. With event gating on
/// (the default) a row moves only at its target's spikes and at the
/// unit's own spikes, so a trained unit settles into firing near the
/// target rate instead of being dragged to rest by the quiet steps
/// between target events.
class ReadoutTrainer {
public:
    ReadoutTrainer(DenseMatrix& w, const LifParams& params, const ReadoutConfig& cfg);

    /// Fresh presentation: zero membranes and refractory counters.
    void reset();

    /// One step with learning; returns the step's mean squared target
    /// error, 1/(2n) * sum (v_des - v)^2.
    double train_step(const std::uint8_t* features, const std::uint8_t* target_frame);

    /// Present one feature window against a target raster (resets
    /// first); returns the summed step loss.
    double train_window(const SpikeRaster& features, const SpikeRaster& target);

private:
    DenseMatrix* w_;
    LifParams params_;
    ReadoutConfig cfg_;
    LifPopulation pop_;
    std::vector<double> current_, potential_;
    std::vector<std::uint8_t> spikes_;
    std::vector<int> active_;
};

/// Outcome of classifying one stimulus.
struct Decision {
    int label = -1;                           ///< argmax class, lowest index on ties
    std::vector<std::uint64_t> spike_counts;  ///< per class, summed over all passes
};

/// Argmax over summed per-class spike counts, ties to the lowest
/// class index.
Decision decide(std::vector<std::uint64_t> class_counts);

}  // namespace spikecnn
