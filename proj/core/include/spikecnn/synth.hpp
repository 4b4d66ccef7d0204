#pragma once

#include "spikecnn/dataset.hpp"
#include "spikecnn/image.hpp"
#include "spikecnn/rng.hpp"

namespace spikecnn {

/// Render one synthetic digit glyph (0-9) into a square single-channel
/// image. Digits are stroke skeletons drawn with a soft brush under a
/// random small affine jitter, so every call with a fresh stream state
/// yields a different sample. Intended for demos and for exercising
/// file formats at full dataset scale without shipping large corpora.
Image synth_digit(int digit, int side, RngStream& rng);

/// Generate `n` labeled samples, labels cycling 0..9.
Dataset synth_digit_set(std::size_t n, int side, RngStream& rng);

}  // namespace spikecnn
