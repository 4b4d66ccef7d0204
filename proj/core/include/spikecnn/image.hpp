#pragma once

#include <cstdint>
#include <vector>

namespace spikecnn {

/// Raw intensity grid, 1 (grayscale) or 3 (RGB planes) channels,
/// values 0-255 exactly as stored in the dataset files. Intensities are
/// never normalized here; the only place intensity is scaled is the
/// Poisson encoder.
struct Image {
    int channels = 0;
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> px;  ///< [channel][row][col]

    Image() = default;
    Image(int ch, int r, int c) : channels(ch), rows(r), cols(c), px(static_cast<std::size_t>(ch) * r * c, 0) {}

    std::uint8_t at(int ch, int r, int c) const {
        return px[(static_cast<std::size_t>(ch) * rows + r) * cols + c];
    }
    void set(int ch, int r, int c, std::uint8_t val) {
        px[(static_cast<std::size_t>(ch) * rows + r) * cols + c] = val;
    }
};

}  // namespace spikecnn
