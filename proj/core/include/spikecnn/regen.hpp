#pragma once

#include <cstdint>
#include <vector>

#include "spikecnn/lif.hpp"
#include "spikecnn/raster.hpp"
#include "spikecnn/topology.hpp"

namespace spikecnn {

/// Knobs of the layer-wise regenerative rule.
struct LearnConfig {
    double eta = 0.001;      ///< learning rate applied to every kernel update
    double clip_abs = 0.0;   ///< clamp |w| to this after each update; 0 disables
    bool per_step = true;    ///< apply updates every step; false batches one update per window
    bool event_gated = true; ///< restrict each visible unit's error to steps where its input
                             ///< or its regenerated train carries a spike; false keeps the
                             ///< error live at every step, which also punishes the quiet
                             ///< tail between input events
    void validate() const;
};

/// Per-step bookkeeping returned by the trainer.
struct RegenStepStats {
    double loss = 0.0;  ///< mean squared regeneration error, 1/(2n) * sum e^2
    std::uint64_t input_spikes = 0;
    std::uint64_t hidden_spikes = 0;
    std::uint64_t visible_spikes = 0;  ///< regenerated (decoder-side) events
};

/// Totals over one full stimulus window.
struct RegenWindowStats {
    double loss_sum = 0.0;
    std::uint64_t input_spikes = 0;
    std::uint64_t hidden_spikes = 0;
    std::uint64_t visible_spikes = 0;
    int steps = 0;
};

// -- Pure pieces of the learning rule, exposed for direct testing. --

/// Encoder current: J_h[k] = sum_l valid cross-correlation of input
/// spikes x_l with kernel w[k,l]. Scatters from spike events.
void encode_current(const std::uint8_t* x, Shape3 in_shape, const KernelStack& ks, std::vector<double>& j_hidden);

/// Decoder current: J_y[l] = sum_k full cross-correlation of hidden
/// spikes with the flipped kernel. A hidden spike at (u, v) therefore
/// stamps the unflipped kernel at offsets (u+a, v+b), which always
/// lands inside the visible map.
void decode_current(const std::uint8_t* h, Shape3 hidden_shape, const KernelStack& ks, std::vector<double>& j_visible);

/// Target potential per visible unit: v_th where the input spiked this
/// step, v_res where it stayed silent.
void desired_potential(const std::uint8_t* x, std::size_t n, double v_th, double v_res, std::vector<double>& v_des);

/// Output-side delta: delta_y = (v_des - y_pre) .* y_pre, the
/// potential-gated regeneration error.
void delta_output(const std::vector<double>& v_des, const std::vector<double>& y_pre, std::vector<double>& delta_y);

/// Hidden-side delta: delta_h[k] = (sum_l valid cross-correlation of
/// delta_y_l with w[k,l]) .* h_pre[k]. This is the adjoint of the
/// decoder map, gated by the hidden integrated potentials. Dense; the
/// only O(volume * kernel) computation in the step.
void delta_hidden(const std::vector<double>& delta_y, Shape3 in_shape, const KernelStack& ks,
                  const std::vector<double>& h_pre, Shape3 hidden_shape, std::vector<double>& delta_h);

/// Tied-weight gradient for one step, accumulated into `grad` (which
/// must match `ks` in shape; zero it first for a fresh gradient):
///
///   grad[k,l] = corr_valid(x_l, delta_h[k]) + corr_valid(delta_y_l, h[k])
///
/// The first term is the encoder synapses' delta rule, the second the
/// decoder synapses' delta rule folded back through the weight tie.
/// Both terms scatter from spike events (x spikes and h spikes), so
/// the cost scales with activity.
void conv_ae_gradient(const std::uint8_t* x, Shape3 in_shape, const std::vector<double>& delta_h,
                      const std::uint8_t* h, Shape3 hidden_shape, const std::vector<double>& delta_y,
                      const KernelStack& ks, KernelStack& grad);

/// w += eta * grad, then optional symmetric clipping. Throws
/// NumericError if any updated weight is not finite.
void apply_update(KernelStack& ks, const KernelStack& grad, const LearnConfig& cfg);

/// Trains one convolutional kernel stack as a spiking auto-encoder.
/// Every step runs encode -> spike -> decode -> spike, compares the
/// regenerated potentials against the spike-aligned targets and
/// applies the tied-weight update online. The caller owns the kernel
/// stack; the trainer only borrows it.
class LayerTrainer {
public:
    LayerTrainer(KernelStack& stack, Shape3 input_shape, const LifParams& params, const LearnConfig& cfg);

    /// Zero both populations (fresh presentation).
    void reset();

    /// One step with learning.
    RegenStepStats train_step(const std::uint8_t* input_frame);

    /// One step without touching the weights (loss probes, repair
    /// quality measurements, reconstruction).
    RegenStepStats observe_step(const std::uint8_t* input_frame);

    /// Present a whole window, resetting first. Updates weights.
    RegenWindowStats train_window(const SpikeRaster& input);

    /// Present a whole window without learning; if `regenerated` is
    /// given it receives the decoder-side spike raster.
    RegenWindowStats observe_window(const SpikeRaster& input, SpikeRaster* regenerated = nullptr);

    Shape3 input_shape() const { return in_shape_; }
    Shape3 hidden_shape() const { return hidden_shape_; }
    const std::vector<std::uint8_t>& hidden_spikes() const { return h_spikes_; }
    const std::vector<std::uint8_t>& visible_spikes() const { return y_spikes_; }
    const std::vector<double>& visible_potential() const { return y_pre_; }

private:
    RegenStepStats run_step(const std::uint8_t* input_frame, bool learn);

    KernelStack* ks_;
    Shape3 in_shape_;
    Shape3 hidden_shape_;
    LifParams params_;
    LearnConfig cfg_;

    LifPopulation hidden_pop_;
    LifPopulation visible_pop_;
    std::vector<double> j_hidden_, j_visible_;
    std::vector<double> h_pre_, y_pre_;
    std::vector<std::uint8_t> h_spikes_, y_spikes_;
    std::vector<double> v_des_, delta_y_, delta_h_;
    KernelStack grad_;
};

/// Squared spike-count regeneration error of one window: for every
/// visible unit, (input spike count - regenerated spike count)^2,
/// summed over units. Used as the held-out repair metric.
double window_count_error(const SpikeRaster& input, const SpikeRaster& regenerated);

}  // namespace spikecnn
