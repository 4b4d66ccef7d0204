#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "spikecnn/dataset.hpp"
#include "spikecnn/rng.hpp"

namespace fixtures {

/// Directory with the bundled digit dataset (set by the build).
inline std::string data_dir() {
#ifdef SPIKECNN_DATA_DIR
    return SPIKECNN_DATA_DIR;
#else
    return "data";
#endif
}

inline std::string digits_dir() { return data_dir() + "/digits"; }

/// Fresh scratch directory under the system temp root. Never reused
/// across calls, cleaned only by the OS.
inline std::string scratch_dir(const std::string& tag) {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path() / ("spikecnn-" + tag + "-" + std::to_string(::getpid()) +
                                                                "-" + std::to_string(counter++));
    std::filesystem::create_directories(base);
    return base.string();
}

/// Grow a dataset to `n` samples by cycling through the base images
/// under small integer pixel shifts (zero fill). Keeps labels aligned;
/// purely deterministic.
inline spikecnn::Dataset augment_by_shifts(const spikecnn::Dataset& base, std::size_t n) {
    static const int kShifts[][2] = {{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    spikecnn::Dataset out;
    out.channels = base.channels;
    out.rows = base.rows;
    out.cols = base.cols;
    out.images.reserve(n);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = i % base.size();
        const auto& shift = kShifts[(i / base.size()) % (sizeof kShifts / sizeof kShifts[0])];
        const spikecnn::Image& s = base.images[src];
        spikecnn::Image img(s.channels, s.rows, s.cols);
        for (int ch = 0; ch < s.channels; ++ch)
            for (int r = 0; r < s.rows; ++r)
                for (int c = 0; c < s.cols; ++c) {
                    const int rr = r - shift[0], cc = c - shift[1];
                    if (rr >= 0 && rr < s.rows && cc >= 0 && cc < s.cols) img.set(ch, r, c, s.at(ch, rr, cc));
                }
        out.images.push_back(std::move(img));
        out.labels.push_back(base.labels[src]);
    }
    return out;
}

}  // namespace fixtures
