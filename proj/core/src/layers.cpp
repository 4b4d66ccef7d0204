#include "spikecnn/layers.hpp"

#include <algorithm>
#include <cstring>

#include "spikecnn/errors.hpp"

namespace spikecnn {

ForwardPass::ForwardPass(const NetworkTopology& topo, const LifParams& params)
    : topo_(&topo), params_(params) {
    params_.validate();
    if (topo.layers.empty()) throw ValueError("ForwardPass: empty topology");

    int conv_seen = 0;
    for (const LayerDescriptor& d : topo.layers) {
        LayerState st;
        st.kind = d.kind;
        st.shape = {d.maps, d.rows, d.cols};
        std::size_t n = st.shape.count();
        st.spikes.assign(n, 0);
        if (d.kind == LayerKind::conv || d.kind == LayerKind::output) {
            st.pop = LifPopulation(st.shape, params_);
            st.current.assign(n, 0.0);
            st.potential.assign(n, 0.0);
        } else if (d.kind == LayerKind::avgpool) {
            st.potential.assign(n, 0.0);
        }
        conv_index_of_layer_.push_back(d.kind == LayerKind::conv ? conv_seen++ : -1);
        layers_.push_back(std::move(st));
    }
}

void ForwardPass::reset() {
    for (LayerState& st : layers_) {
        std::fill(st.spikes.begin(), st.spikes.end(), 0);
        std::fill(st.current.begin(), st.current.end(), 0.0);
        std::fill(st.potential.begin(), st.potential.end(), 0.0);
        if (st.kind == LayerKind::conv || st.kind == LayerKind::output) reset_population(st.pop);
    }
}

void ForwardPass::step(const std::uint8_t* input_frame) {
    step_prefix(input_frame, layer_count() - 1);
}

void ForwardPass::step_prefix(const std::uint8_t* input_frame, int last_layer) {
    if (last_layer < 0 || last_layer >= layer_count())
        throw ValueError("step_prefix: layer index out of range");

    LayerState& in = layers_[0];
    std::memcpy(in.spikes.data(), input_frame, in.spikes.size());

    for (int i = 1; i <= last_layer; ++i) {
        switch (layers_[i].kind) {
            case LayerKind::conv:
                step_conv(i, conv_index_of_layer_[i]);
                break;
            case LayerKind::avgpool:
                step_pool(i);
                break;
            case LayerKind::output:
                step_output(i);
                break;
            case LayerKind::input:
                throw ValueError("step_prefix: input descriptor after layer 0");
        }
    }
}

void ForwardPass::step_conv(int layer_index, int conv_index) {
    LayerState& st = layers_[layer_index];
    const LayerState& below = layers_[layer_index - 1];
    const KernelStack& ks = topo_->stacks.at(static_cast<std::size_t>(conv_index));

    std::fill(st.current.begin(), st.current.end(), 0.0);

    const int in_rows = below.shape.rows;
    const int in_cols = below.shape.cols;
    const int out_rows = st.shape.rows;
    const int out_cols = st.shape.cols;
    const int kh = ks.kh;
    const int kw = ks.kw;

    // Each presynaptic spike at (l, r, c) stamps kernel w[k,l] onto the
    // current map of every output map k: output unit (r-a, c-b) owns
    // the synapse with weight w[k,l,a,b] under the valid
    // cross-correlation wiring, so only in-range (a, b) offsets are
    // visited.
    const std::uint8_t* src = below.spikes.data();
    for (int l = 0; l < below.shape.maps; ++l) {
        const std::uint8_t* map = src + static_cast<std::size_t>(l) * in_rows * in_cols;
        for (int r = 0; r < in_rows; ++r) {
            for (int c = 0; c < in_cols; ++c) {
                if (!map[r * in_cols + c]) continue;
                const int a_lo = std::max(0, r - (out_rows - 1));
                const int a_hi = std::min(kh - 1, r);
                const int b_lo = std::max(0, c - (out_cols - 1));
                const int b_hi = std::min(kw - 1, c);
                for (int k = 0; k < st.shape.maps; ++k) {
                    const double* w = ks.w.data() + ks.offset(k, l);
                    double* cur = st.current.data() + static_cast<std::size_t>(k) * out_rows * out_cols;
                    for (int a = a_lo; a <= a_hi; ++a) {
                        double* row = cur + static_cast<std::size_t>(r - a) * out_cols;
                        const double* wrow = w + static_cast<std::size_t>(a) * kw;
                        for (int b = b_lo; b <= b_hi; ++b) {
                            row[c - b] += wrow[b];
                            ++synaptic_ops_;
                        }
                    }
                }
            }
        }
    }

    lif_step(st.pop, st.current, st.spikes, &st.potential);
}

void ForwardPass::step_pool(int layer_index) {
    LayerState& st = layers_[layer_index];
    const LayerState& below = layers_[layer_index - 1];
    const int window = topo_->layers[layer_index].param;
    const int out_rows = st.shape.rows;
    const int out_cols = st.shape.cols;
    const int in_cols = below.shape.cols;
    const double inv = 1.0 / (window * window);
    const double v_th = params_.v_th;

    for (int m = 0; m < st.shape.maps; ++m) {
        const double* src = below.potential.data() + static_cast<std::size_t>(m) * below.shape.rows * in_cols;
        double* dst = st.potential.data() + static_cast<std::size_t>(m) * out_rows * out_cols;
        std::uint8_t* spk = st.spikes.data() + static_cast<std::size_t>(m) * out_rows * out_cols;
        for (int r = 0; r < out_rows; ++r) {
            for (int c = 0; c < out_cols; ++c) {
                double acc = 0.0;
                for (int dr = 0; dr < window; ++dr) {
                    const double* row = src + static_cast<std::size_t>(r * window + dr) * in_cols + c * window;
                    for (int dc = 0; dc < window; ++dc) acc += row[dc];
                }
                const double p = acc * inv;
                dst[r * out_cols + c] = p;
                spk[r * out_cols + c] = p >= v_th ? 1 : 0;
            }
        }
    }
}

void ForwardPass::step_output(int layer_index) {
    LayerState& st = layers_[layer_index];
    const LayerState& below = layers_[layer_index - 1];
    const DenseMatrix& w = topo_->readout;
    if (w.rows != st.shape.rows || w.cols != static_cast<int>(below.spikes.size()))
        throw ShapeError("step_output: readout matrix does not match topology");

    std::vector<int> active;
    for (int i = 0; i < static_cast<int>(below.spikes.size()); ++i)
        if (below.spikes[i]) active.push_back(i);

    std::fill(st.current.begin(), st.current.end(), 0.0);
    for (int j = 0; j < w.rows; ++j) {
        const double* row = w.w.data() + static_cast<std::size_t>(j) * w.cols;
        double acc = 0.0;
        for (int i : active) acc += row[i];
        synaptic_ops_ += active.size();
        st.current[j] = acc;
    }

    lif_step(st.pop, st.current, st.spikes, &st.potential);
}

WindowResult run_window(ForwardPass& fwd, const SpikeRaster& input, int record_layer, SpikeRaster* recorded) {
    if (!(input.shape == fwd.layer(0).shape))
        throw ShapeError("run_window: input raster does not match the input layer");
    if (record_layer >= fwd.layer_count())
        throw ValueError("run_window: record_layer out of range");
    if (record_layer >= 0) {
        if (!recorded) throw ValueError("run_window: record_layer set but no raster given");
        *recorded = SpikeRaster(fwd.layer(record_layer).shape, input.steps);
    }

    fwd.reset();
    WindowResult res;
    res.spikes_per_layer.assign(fwd.layer_count(), 0);
    res.output_counts.assign(fwd.layer(fwd.layer_count() - 1).spikes.size(), 0);

    for (int t = 0; t < input.steps; ++t) {
        fwd.step(input.frame_data(t));
        for (int i = 0; i < fwd.layer_count(); ++i) {
            const std::vector<std::uint8_t>& s = fwd.layer(i).spikes;
            for (std::uint8_t b : s) res.spikes_per_layer[i] += b;
        }
        const std::vector<std::uint8_t>& out = fwd.layer(fwd.layer_count() - 1).spikes;
        for (std::size_t j = 0; j < out.size(); ++j) res.output_counts[j] += out[j];
        if (record_layer >= 0) recorded->store_frame(t, fwd.layer(record_layer).spikes.data());
    }
    return res;
}

void run_prefix_window(ForwardPass& fwd, const SpikeRaster& input, int last_layer, SpikeRaster& recorded) {
    if (!(input.shape == fwd.layer(0).shape))
        throw ShapeError("run_prefix_window: input raster does not match the input layer");
    if (last_layer < 0 || last_layer >= fwd.layer_count())
        throw ValueError("run_prefix_window: last_layer out of range");

    recorded = SpikeRaster(fwd.layer(last_layer).shape, input.steps);
    fwd.reset();
    for (int t = 0; t < input.steps; ++t) {
        fwd.step_prefix(input.frame_data(t), last_layer);
        recorded.store_frame(t, fwd.layer(last_layer).spikes.data());
    }
}

}  // namespace spikecnn
