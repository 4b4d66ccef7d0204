#pragma once

#include "spikecnn/image.hpp"
#include "spikecnn/raster.hpp"
#include "spikecnn/rng.hpp"

namespace spikecnn {

/// Rate-code an image as independent Bernoulli spike events: each pixel
/// fires per step with probability (intensity/255) * i_rate_hz * dt/1000,
/// so a full-intensity pixel fires at i_rate_hz on average.
///
/// The raster has one map per image channel and window_ms / dt steps.
/// Draw order is fixed (step-major, then channel, row, column; one draw
/// per pixel per step), so a given RngStream state always yields the
/// same raster.
///
/// window_ms must be a positive multiple of dt, and the per-step
/// probability i_rate_hz * dt/1000 must not exceed 1; violations raise
/// ValueError.
SpikeRaster poisson_encode(const Image& image, double i_rate_hz, int window_ms, RngStream& rng);

}  // namespace spikecnn
