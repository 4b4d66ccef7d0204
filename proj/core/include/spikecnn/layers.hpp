#pragma once

#include <cstdint>
#include <vector>

#include "spikecnn/lif.hpp"
#include "spikecnn/raster.hpp"
#include "spikecnn/topology.hpp"

namespace spikecnn {

/// Per-layer runtime buffers. Conv and output layers own a spiking
/// population; pooling layers are stateless and recompute their values
/// from the layer below on every step; the input layer only mirrors
/// the current stimulus frame.
struct LayerState {
    LayerKind kind = LayerKind::input;
    Shape3 shape{0, 0, 0};
    LifPopulation pop;                 ///< conv/output layers only
    std::vector<double> current;       ///< injected current this step
    std::vector<double> potential;     ///< integrated (pre-reset) potentials
    std::vector<std::uint8_t> spikes;  ///< this step's spike frame
};

/// Event-driven forward pass over a parsed topology. Each call to
/// step() consumes one frame of input spikes and advances every layer
/// by one simulation step. Spikes propagate as weight scatters, so the
/// work per step scales with the spike count rather than with the
/// dense activation volume; `synaptic_ops()` reports the accumulated
/// multiply-add count for exactly that reason.
///
/// Pooling layers average the integrated (pre-reset) potentials of the
/// conv layer below and emit a spike wherever that average reaches the
/// firing threshold. They keep no state of their own, so resetting the
/// network never has to touch them.
class ForwardPass {
public:
    /// `topo` must outlive the pass and have initialized weights for
    /// every layer that is actually stepped.
    ForwardPass(const NetworkTopology& topo, const LifParams& params);

    /// Zero all membrane state, refractory counters, currents,
    /// potentials and spike frames.
    void reset();

    /// Advance the whole network one step. `input_frame` must hold
    /// layer 0's spike frame (maps*rows*cols bytes, map-row-major).
    void step(const std::uint8_t* input_frame);

    /// Advance only layers [0, last_layer]; deeper layers keep their
    /// previous buffers untouched. Used to drive a frozen prefix when
    /// training one layer at a time.
    void step_prefix(const std::uint8_t* input_frame, int last_layer);

    int layer_count() const { return static_cast<int>(layers_.size()); }
    const LayerState& layer(int i) const { return layers_[i]; }
    const NetworkTopology& topology() const { return *topo_; }
    const LifParams& params() const { return params_; }

    std::uint64_t synaptic_ops() const { return synaptic_ops_; }
    void reset_synaptic_ops() { synaptic_ops_ = 0; }

private:
    void step_conv(int layer_index, int conv_index);
    void step_pool(int layer_index);
    void step_output(int layer_index);

    const NetworkTopology* topo_;
    LifParams params_;
    std::vector<LayerState> layers_;
    std::vector<int> conv_index_of_layer_;  ///< -1 for non-conv layers
    std::uint64_t synaptic_ops_ = 0;
};

/// Aggregate results of driving a network over one stimulus window.
struct WindowResult {
    std::vector<std::uint64_t> spikes_per_layer;   ///< total events per layer
    std::vector<std::uint64_t> output_counts;      ///< per output neuron
};

/// Present `input` to the network frame by frame (resetting first) and
/// collect spike totals. If `record_layer` >= 0, that layer's spike
/// frames are stored step by step into `recorded`, which is resized to
/// match.
WindowResult run_window(ForwardPass& fwd, const SpikeRaster& input, int record_layer = -1,
                        SpikeRaster* recorded = nullptr);

/// Drive only layers [0, last_layer] over the window and record
/// `last_layer`'s spike frames into `recorded`. This is how training
/// of layer c obtains its input spike trains from the frozen prefix.
void run_prefix_window(ForwardPass& fwd, const SpikeRaster& input, int last_layer, SpikeRaster& recorded);

}  // namespace spikecnn
