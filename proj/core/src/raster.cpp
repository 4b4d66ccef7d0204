#include "spikecnn/raster.hpp"

#include <cstring>

namespace spikecnn {

void SpikeRaster::extract_frame(int t, std::vector<BitGrid>& out) const {
    out.resize(shape.maps);
    const std::size_t per_map = static_cast<std::size_t>(shape.rows) * shape.cols;
    const std::uint8_t* src = frame_data(t);
    for (int m = 0; m < shape.maps; ++m) {
        BitGrid& g = out[m];
        if (g.rows != shape.rows || g.cols != shape.cols) {
            g = BitGrid(shape.rows, shape.cols);
        }
        std::memcpy(g.v.data(), src + per_map * m, per_map);
    }
}

void SpikeRaster::store_frame(int t, const std::vector<BitGrid>& frames) {
    const std::size_t per_map = static_cast<std::size_t>(shape.rows) * shape.cols;
    std::uint8_t* dst = frame_data(t);
    for (int m = 0; m < shape.maps; ++m) {
        std::memcpy(dst + per_map * m, frames[m].v.data(), per_map);
    }
}

void SpikeRaster::store_frame(int t, const std::uint8_t* frame) {
    std::memcpy(frame_data(t), frame, shape.count());
}

std::vector<std::uint64_t> SpikeRaster::events_per_map() const {
    const std::size_t per_map = static_cast<std::size_t>(shape.rows) * shape.cols;
    std::vector<std::uint64_t> totals(shape.maps, 0);
    for (int t = 0; t < steps; ++t) {
        const std::uint8_t* f = frame_data(t);
        for (int m = 0; m < shape.maps; ++m) {
            const std::uint8_t* src = f + per_map * m;
            for (std::size_t i = 0; i < per_map; ++i) {
                totals[m] += src[i];
            }
        }
    }
    return totals;
}

std::vector<std::vector<int>> SpikeRaster::counts_per_map() const {
    const std::size_t per_map = static_cast<std::size_t>(shape.rows) * shape.cols;
    std::vector<std::vector<int>> counts(shape.maps, std::vector<int>(per_map, 0));
    for (int t = 0; t < steps; ++t) {
        const std::uint8_t* f = frame_data(t);
        for (int m = 0; m < shape.maps; ++m) {
            const std::uint8_t* src = f + per_map * m;
            std::vector<int>& c = counts[m];
            for (std::size_t i = 0; i < per_map; ++i) {
                c[i] += src[i];
            }
        }
    }
    return counts;
}

}  // namespace spikecnn
