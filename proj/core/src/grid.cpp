#include "spikecnn/grid.hpp"

#include <algorithm>
#include <string>

#include "spikecnn/errors.hpp"

namespace spikecnn {

void conv2d_valid_into(const Grid2D& input, const Grid2D& kernel, Grid2D& out, bool accumulate) {
    if (kernel.rows > input.rows || kernel.cols > input.cols) {
        throw ShapeError("conv2d_valid: kernel " + std::to_string(kernel.rows) + "x" +
                         std::to_string(kernel.cols) + " exceeds input " + std::to_string(input.rows) +
                         "x" + std::to_string(input.cols));
    }
    const int or_ = input.rows - kernel.rows + 1;
    const int oc = input.cols - kernel.cols + 1;
    if (out.rows != or_ || out.cols != oc) {
        out = Grid2D(or_, oc);
    } else if (!accumulate) {
        out.fill(0.0);
    }
    for (int i = 0; i < or_; ++i) {
        for (int j = 0; j < oc; ++j) {
            double acc = 0.0;
            for (int a = 0; a < kernel.rows; ++a) {
                const double* in_row = &input.v[static_cast<std::size_t>(i + a) * input.cols + j];
                const double* k_row = &kernel.v[static_cast<std::size_t>(a) * kernel.cols];
                for (int b = 0; b < kernel.cols; ++b) {
                    acc += in_row[b] * k_row[b];
                }
            }
            out.at(i, j) += acc;
        }
    }
}

Grid2D conv2d_valid(const Grid2D& input, const Grid2D& kernel) {
    Grid2D out;
    conv2d_valid_into(input, kernel, out);
    return out;
}

Grid2D conv2d_full(const Grid2D& input, const Grid2D& kernel) {
    const int pr = kernel.rows - 1;
    const int pc = kernel.cols - 1;
    Grid2D padded(input.rows + 2 * pr, input.cols + 2 * pc);
    for (int r = 0; r < input.rows; ++r) {
        std::copy_n(&input.v[static_cast<std::size_t>(r) * input.cols], input.cols,
                    &padded.v[static_cast<std::size_t>(r + pr) * padded.cols + pc]);
    }
    return conv2d_valid(padded, kernel);
}

Grid2D flip2d(const Grid2D& kernel) {
    Grid2D out(kernel.rows, kernel.cols);
    for (int a = 0; a < kernel.rows; ++a) {
        for (int b = 0; b < kernel.cols; ++b) {
            out.at(a, b) = kernel.at(kernel.rows - 1 - a, kernel.cols - 1 - b);
        }
    }
    return out;
}

void avg_pool_into(const Grid2D& potentials, int window, Grid2D& out) {
    if (window < 1) {
        throw ValueError("avg_pool: window must be >= 1");
    }
    if (potentials.rows % window != 0 || potentials.cols % window != 0) {
        throw ShapeError("avg_pool: grid " + std::to_string(potentials.rows) + "x" +
                         std::to_string(potentials.cols) + " not divisible by window " +
                         std::to_string(window));
    }
    const int or_ = potentials.rows / window;
    const int oc = potentials.cols / window;
    if (out.rows != or_ || out.cols != oc) {
        out = Grid2D(or_, oc);
    }
    const double inv = 1.0 / (static_cast<double>(window) * window);
    for (int i = 0; i < or_; ++i) {
        for (int j = 0; j < oc; ++j) {
            double acc = 0.0;
            for (int a = 0; a < window; ++a) {
                const double* row = &potentials.v[static_cast<std::size_t>(i * window + a) * potentials.cols + j * window];
                for (int b = 0; b < window; ++b) {
                    acc += row[b];
                }
            }
            out.at(i, j) = acc * inv;
        }
    }
}

Grid2D avg_pool(const Grid2D& potentials, int window) {
    Grid2D out;
    avg_pool_into(potentials, window, out);
    return out;
}

}  // namespace spikecnn
