#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace spikecnn {

/// Dense 2D array of doubles, row-major. Used for membrane potentials,
/// synaptic currents, error maps and convolution kernels alike.
struct Grid2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Grid2D() = default;
    Grid2D(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    std::size_t size() const { return v.size(); }
    void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

/// Dense row-major weight matrix for the fully connected readout.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> w;

    DenseMatrix() = default;
    DenseMatrix(int r, int c, double fill = 0.0) : rows(r), cols(c), w(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return w[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return w[static_cast<std::size_t>(r) * cols + c]; }
};

/// Sliding-window cross-correlation, "valid" extent.
///
/// out[i,j] = sum_{a,b} input[i+a, j+b] * kernel[a,b]
///
/// There is no implicit kernel flip anywhere in this library: every
/// convolution is indexed exactly as above, and the decode path applies
/// flip2d explicitly where a flipped kernel is required. All gradient
/// identities in the learning module depend on this convention.
///
/// Output is (m-n+1) x (m-n+1) for an m x m input and n x n kernel.
/// Accumulation order is row-major, so results are reproducible
/// bit-for-bit on one platform.
///
/// Throws ShapeError if the kernel is larger than the input in either
/// dimension.
Grid2D conv2d_valid(const Grid2D& input, const Grid2D& kernel);

/// As conv2d_valid, accumulating into `out` (resized as needed). When
/// `accumulate` is true, adds onto the existing contents.
void conv2d_valid_into(const Grid2D& input, const Grid2D& kernel, Grid2D& out, bool accumulate = false);

/// Cross-correlation with the input zero-padded by (kernel-1) on every
/// side: output is (m+n-1) x (m+n-1). Equivalent to conv2d_valid on the
/// padded input.
Grid2D conv2d_full(const Grid2D& input, const Grid2D& kernel);

/// Reverse a kernel in both dimensions: out[a,b] = in[kh-1-a, kw-1-b].
Grid2D flip2d(const Grid2D& kernel);

/// Mean over non-overlapping s x s windows. The grid dimensions must be
/// divisible by s; anything else is a ShapeError.
Grid2D avg_pool(const Grid2D& potentials, int window);

/// As avg_pool, writing into `out`.
void avg_pool_into(const Grid2D& potentials, int window, Grid2D& out);

}  // namespace spikecnn
