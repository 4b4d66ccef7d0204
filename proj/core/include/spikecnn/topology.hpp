#pragma once

#include <string>
#include <vector>

#include "spikecnn/grid.hpp"
#include "spikecnn/lif.hpp"
#include "spikecnn/rng.hpp"

namespace spikecnn {

enum class LayerKind { input, conv, avgpool, output };

/// Geometry of one layer plus its defining parameter (kernel size for
/// conv layers, window size for pooling layers, nothing otherwise).
/// `maps`/`rows`/`cols` describe the layer's own neuron grid.
struct LayerDescriptor {
    LayerKind kind = LayerKind::input;
    int maps = 0;
    int rows = 0;
    int cols = 0;
    int param = 0;  ///< conv: kernel side, avgpool: window side
};

/// Learnable kernels of one convolutional layer, stored as a dense
/// (out_map, in_map, kh, kw) array. The decoder of the layer-wise
/// auto-encoder uses the flip of these same weights; flipped kernels
/// are derived on demand and never stored, so encoder and decoder
/// cannot drift apart.
struct KernelStack {
    int out_maps = 0;
    int in_maps = 0;
    int kh = 0;
    int kw = 0;
    std::vector<double> w;

    KernelStack() = default;
    KernelStack(int out, int in, int h, int wdt)
        : out_maps(out), in_maps(in), kh(h), kw(wdt), w(static_cast<std::size_t>(out) * in * h * wdt, 0.0) {}

    std::size_t offset(int k, int l) const {
        return (static_cast<std::size_t>(k) * in_maps + l) * kh * kw;
    }
    double& at(int k, int l, int a, int b) { return w[offset(k, l) + static_cast<std::size_t>(a) * kw + b]; }
    double at(int k, int l, int a, int b) const { return w[offset(k, l) + static_cast<std::size_t>(a) * kw + b]; }

    /// Copy of one (out_map, in_map) kernel slice.
    Grid2D kernel(int k, int l) const;
    void set_kernel(int k, int l, const Grid2D& g);

    /// w[k,l] += scale * g
    void add_scaled(int k, int l, const Grid2D& g, double scale);
};

/// An ordered stack of layer descriptors with the weights that belong
/// to them: one KernelStack per conv layer (in layer order) and the
/// fully connected readout matrix feeding the output layer.
struct NetworkTopology {
    std::string text;  ///< the compact string this topology was parsed from
    std::vector<LayerDescriptor> layers;
    std::vector<KernelStack> stacks;
    DenseMatrix readout;

    Shape3 layer_shape(int layer_index) const {
        const LayerDescriptor& d = layers[layer_index];
        return {d.maps, d.rows, d.cols};
    }

    /// Indices into `layers` of the conv layers, in order.
    std::vector<int> conv_layer_indices() const;

    /// Index of the layer whose spikes feed the readout (the one just
    /// before the output descriptor).
    int feature_layer_index() const { return static_cast<int>(layers.size()) - 2; }

    /// Flattened spike-vector length fed into the readout.
    int feature_count() const;

    /// For conv layer number `conv_idx` (0-based among conv layers),
    /// the index in `layers` of the layer that feeds it.
    int conv_input_layer(int conv_idx) const;
};

/// Parse a compact topology string such as
///
///   28x28-12c5-2a-64c5-2a-10o
///   32x32x3-32c5-2a-32c5-2a-64c4-10o
///
/// Grammar: `HxW` or `HxWxC` for the input layer, then '-'-separated
/// tokens: `<n>c<k>` (conv layer, n maps, k x k kernels, valid extent),
/// `<s>a` (s x s average pooling) and `<n>o` (fully connected output
/// with n classes, final token only).
///
/// Geometries are computed with the valid-convolution and pooling shape
/// rules; weights are left unallocated until init_weights. Grammar
/// violations raise ValueError; a kernel larger than its input map or a
/// non-divisible pooling window raises ShapeError.
NetworkTopology parse_topology(const std::string& text);

/// Allocate and initialize all weights: kernel entries are independent
/// uniform draws from [init_lo, init_hi], then the readout matrix from
/// [readout_lo, readout_hi] (which defaults to the kernel range scaled
/// by nothing; pass a smaller range for wide feature vectors). The
/// defaults are positive because with the thresholds in use a
/// zero-mean fan-in-scaled init leaves every layer silent, and the
/// potential-gated update rule cannot recover from a silent start.
void init_weights(NetworkTopology& topo, RngStream& rng, double init_lo = 0.0, double init_hi = 1.0,
                  double readout_lo = 0.0, double readout_hi = 1.0);

}  // namespace spikecnn
