#include "spikecnn/encode.hpp"

#include <cmath>
#include <string>

#include "spikecnn/errors.hpp"

namespace spikecnn {

SpikeRaster poisson_encode(const Image& image, double i_rate_hz, int window_ms, RngStream& rng) {
    const double dt = 1.0;
    if (window_ms <= 0 || std::fmod(static_cast<double>(window_ms), dt) != 0.0) {
        throw ValueError("poisson_encode: window must be a positive multiple of dt");
    }
    const double p_full = i_rate_hz * dt / 1000.0;
    if (p_full < 0.0 || p_full > 1.0) {
        throw ValueError("poisson_encode: rate " + std::to_string(i_rate_hz) +
                         " Hz gives per-step probability " + std::to_string(p_full) +
                         ", outside [0, 1]");
    }

    const int steps = static_cast<int>(window_ms / dt);
    SpikeRaster raster({image.channels, image.rows, image.cols}, steps);
    const double scale = p_full / 255.0;

    for (int t = 0; t < steps; ++t) {
        std::uint8_t* frame = raster.frame_data(t);
        const std::size_t n = image.px.size();
        for (std::size_t i = 0; i < n; ++i) {
            frame[i] = rng.bernoulli(image.px[i] * scale) ? 1 : 0;
        }
    }
    return raster;
}

}  // namespace spikecnn
