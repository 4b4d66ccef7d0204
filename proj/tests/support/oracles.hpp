#pragma once

// Independent reference implementations used to validate the
// production code. Everything here is written as plain loops or
// explicit connectivity matrices, deliberately sharing no code with
// the library's scatter/correlation implementations.

#include <cstdint>
#include <vector>

#include "spikecnn/grid.hpp"
#include "spikecnn/lif.hpp"
#include "spikecnn/rng.hpp"
#include "spikecnn/topology.hpp"

namespace oracle {

using spikecnn::Grid2D;
using spikecnn::KernelStack;
using spikecnn::RngStream;
using spikecnn::Shape3;

inline Grid2D conv_valid(const Grid2D& in, const Grid2D& k) {
    Grid2D out(in.rows - k.rows + 1, in.cols - k.cols + 1);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) {
            double s = 0.0;
            for (int a = 0; a < k.rows; ++a)
                for (int b = 0; b < k.cols; ++b) s += in.at(i + a, j + b) * k.at(a, b);
            out.at(i, j) = s;
        }
    return out;
}

inline Grid2D conv_full(const Grid2D& in, const Grid2D& k) {
    Grid2D out(in.rows + k.rows - 1, in.cols + k.cols - 1);
    const int pr = k.rows - 1, pc = k.cols - 1;
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) {
            double s = 0.0;
            for (int a = 0; a < k.rows; ++a)
                for (int b = 0; b < k.cols; ++b) {
                    const int r = i + a - pr, c = j + b - pc;
                    if (r >= 0 && r < in.rows && c >= 0 && c < in.cols) s += in.at(r, c) * k.at(a, b);
                }
            out.at(i, j) = s;
        }
    return out;
}

inline Grid2D avg_pool(const Grid2D& in, int w) {
    Grid2D out(in.rows / w, in.cols / w);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) {
            double s = 0.0;
            for (int a = 0; a < w; ++a)
                for (int b = 0; b < w; ++b) s += in.at(i * w + a, j * w + b);
            out.at(i, j) = s / (w * w);
        }
    return out;
}

inline Grid2D random_grid(RngStream& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
    Grid2D g(rows, cols);
    for (double& v : g.v) v = rng.uniform(lo, hi);
    return g;
}

/// Explicit connectivity model of one tied-weight convolutional
/// auto-encoder layer. Synapses are enumerated one by one; the encoder
/// matrix E (hidden x visible) and decoder matrix D (visible x hidden)
/// are materialized densely. Every entry of both matrices is tied to a
/// kernel coordinate (k, l, a, b).
struct DenseAe {
    Shape3 vis, hid;
    int kh, kw;
    std::vector<double> enc;  // [hid][vis]
    std::vector<double> dec;  // [vis][hid]

    DenseAe(const KernelStack& ks, Shape3 vis_shape)
        : vis(vis_shape),
          hid{ks.out_maps, vis_shape.rows - ks.kh + 1, vis_shape.cols - ks.kw + 1},
          kh(ks.kh),
          kw(ks.kw),
          enc(hid.count() * vis.count(), 0.0),
          dec(vis.count() * hid.count(), 0.0) {
        for (int k = 0; k < hid.maps; ++k)
            for (int u = 0; u < hid.rows; ++u)
                for (int v = 0; v < hid.cols; ++v)
                    for (int l = 0; l < vis.maps; ++l)
                        for (int a = 0; a < kh; ++a)
                            for (int b = 0; b < kw; ++b) {
                                const std::size_t h = hid_index(k, u, v);
                                const std::size_t x = vis_index(l, u + a, v + b);
                                const double w = ks.at(k, l, a, b);
                                enc[h * vis.count() + x] += w;
                                dec[x * hid.count() + h] += w;
                            }
    }

    std::size_t hid_index(int k, int u, int v) const {
        return (static_cast<std::size_t>(k) * hid.rows + u) * hid.cols + v;
    }
    std::size_t vis_index(int l, int r, int c) const {
        return (static_cast<std::size_t>(l) * vis.rows + r) * vis.cols + c;
    }

    std::vector<double> encode(const std::uint8_t* x) const {
        std::vector<double> j(hid.count(), 0.0);
        for (std::size_t h = 0; h < hid.count(); ++h)
            for (std::size_t i = 0; i < vis.count(); ++i) j[h] += enc[h * vis.count() + i] * x[i];
        return j;
    }

    std::vector<double> decode(const std::uint8_t* h) const {
        std::vector<double> j(vis.count(), 0.0);
        for (std::size_t i = 0; i < vis.count(); ++i)
            for (std::size_t kk = 0; kk < hid.count(); ++kk) j[i] += dec[i * hid.count() + kk] * h[kk];
        return j;
    }

    /// Hidden delta through the explicit decoder transpose, gated by
    /// the hidden integrated potentials.
    std::vector<double> hidden_delta(const std::vector<double>& delta_y, const std::vector<double>& h_pre) const {
        std::vector<double> dh(hid.count(), 0.0);
        for (std::size_t i = 0; i < vis.count(); ++i)
            for (std::size_t h = 0; h < hid.count(); ++h) dh[h] += dec[i * hid.count() + h] * delta_y[i];
        for (std::size_t h = 0; h < hid.count(); ++h) dh[h] *= h_pre[h];
        return dh;
    }

    /// Per-synapse delta-rule gradient folded onto the shared kernel
    /// coordinates: every encoder synapse contributes (hidden delta x
    /// presynaptic input spike), every decoder synapse (visible delta x
    /// presynaptic hidden spike).
    KernelStack gradient(const std::uint8_t* x, const std::vector<double>& delta_h, const std::uint8_t* h,
                         const std::vector<double>& delta_y) const {
        KernelStack g(hid.maps, vis.maps, kh, kw);
        for (int k = 0; k < hid.maps; ++k)
            for (int u = 0; u < hid.rows; ++u)
                for (int v = 0; v < hid.cols; ++v)
                    for (int l = 0; l < vis.maps; ++l)
                        for (int a = 0; a < kh; ++a)
                            for (int b = 0; b < kw; ++b) {
                                const std::size_t hi = hid_index(k, u, v);
                                const std::size_t xi = vis_index(l, u + a, v + b);
                                g.at(k, l, a, b) += delta_h[hi] * x[xi];  // encoder synapse
                                g.at(k, l, a, b) += delta_y[xi] * h[hi];  // decoder synapse
                            }
        return g;
    }
};

}  // namespace oracle
