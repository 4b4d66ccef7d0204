#include "spikecnn/synth.hpp"

#include <algorithm>
#include <cmath>

#include "spikecnn/errors.hpp"

namespace spikecnn {

namespace {

struct Pt {
    double x, y;
};
struct Seg {
    Pt a, b;
};

// Stroke skeletons in a unit square, x right, y down. The layout is a
// six-anchor grid (top/middle/bottom at left/right) plus a few free
// points, which renders as clean segment-style digits.
const Pt TL{0.22, 0.16}, TR{0.78, 0.16}, ML{0.22, 0.50}, MR{0.78, 0.50}, BL{0.22, 0.84}, BR{0.78, 0.84};

std::vector<Seg> glyph(int digit) {
    switch (digit) {
        case 0: return {{TL, TR}, {TR, BR}, {BR, BL}, {BL, TL}};
        case 1: return {{{0.38, 0.28}, {0.55, 0.16}}, {{0.55, 0.16}, {0.55, 0.84}}};
        case 2: return {{TL, TR}, {TR, MR}, {MR, ML}, {ML, BL}, {BL, BR}};
        case 3: return {{TL, TR}, {TR, MR}, {{0.45, 0.50}, MR}, {MR, BR}, {BR, BL}};
        case 4: return {{TL, ML}, {ML, MR}, {TR, MR}, {MR, BR}};
        case 5: return {{TR, TL}, {TL, ML}, {ML, MR}, {MR, BR}, {BR, BL}};
        case 6: return {{TR, TL}, {TL, BL}, {BL, BR}, {BR, MR}, {MR, ML}};
        case 7: return {{TL, TR}, {TR, {0.42, 0.84}}};
        case 8: return {{TL, TR}, {TR, BR}, {BR, BL}, {BL, TL}, {ML, MR}};
        case 9: return {{MR, ML}, {ML, TL}, {TL, TR}, {TR, MR}, {MR, BR}, {BR, BL}};
        default: throw ValueError("synth_digit: digit must be 0..9");
    }
}

}  // namespace

Image synth_digit(int digit, int side, RngStream& rng) {
    if (side < 8) throw ValueError("synth_digit: side must be at least 8");
    std::vector<Seg> segs = glyph(digit);

    // Jitter: small rotation, anisotropic scale, translation, stroke
    // width and peak brightness all vary per sample.
    const double theta = rng.uniform(-0.13, 0.13);
    const double sx = rng.uniform(0.80, 1.00) * side;
    const double sy = rng.uniform(0.80, 1.00) * side;
    const double tx = rng.uniform(-0.06, 0.06) * side + 0.5 * side;
    const double ty = rng.uniform(-0.06, 0.06) * side + 0.5 * side;
    const double sigma = rng.uniform(0.028, 0.040) * side;
    const double peak = rng.uniform(190.0, 255.0);
    const double ct = std::cos(theta), st = std::sin(theta);

    auto map = [&](Pt p) -> Pt {
        const double cx = (p.x - 0.5) * sx;
        const double cy = (p.y - 0.5) * sy;
        return {ct * cx - st * cy + tx, st * cx + ct * cy + ty};
    };

    // The brush profile is a gaussian rescaled to hit zero exactly at
    // `reach`, so glyphs have crisp ink boundaries instead of dim tails
    // flooding the canvas.
    std::vector<double> acc(static_cast<std::size_t>(side) * side, 0.0);
    const double reach = 1.75 * sigma;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double g_edge = std::exp(-reach * reach * inv2s2);

    for (const Seg& s : segs) {
        const Pt a = map(s.a), b = map(s.b);
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int steps = std::max(2, static_cast<int>(len * 2.0));
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            const double px = a.x + t * (b.x - a.x);
            const double py = a.y + t * (b.y - a.y);
            const int r_lo = std::max(0, static_cast<int>(py - reach));
            const int r_hi = std::min(side - 1, static_cast<int>(py + reach) + 1);
            const int c_lo = std::max(0, static_cast<int>(px - reach));
            const int c_hi = std::min(side - 1, static_cast<int>(px + reach) + 1);
            for (int r = r_lo; r <= r_hi; ++r) {
                for (int c = c_lo; c <= c_hi; ++c) {
                    const double dx = c - px, dy = r - py;
                    const double g = (std::exp(-(dx * dx + dy * dy) * inv2s2) - g_edge) / (1.0 - g_edge);
                    double& cell = acc[static_cast<std::size_t>(r) * side + c];
                    cell = std::max(cell, g);
                }
            }
        }
    }

    Image img(1, side, side);
    for (std::size_t i = 0; i < acc.size(); ++i)
        img.px[i] = static_cast<std::uint8_t>(std::clamp(acc[i] * peak, 0.0, 255.0));
    return img;
}

Dataset synth_digit_set(std::size_t n, int side, RngStream& rng) {
    Dataset ds;
    ds.channels = 1;
    ds.rows = side;
    ds.cols = side;
    ds.images.reserve(n);
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int digit = static_cast<int>(i % 10);
        ds.images.push_back(synth_digit(digit, side, rng));
        ds.labels.push_back(static_cast<std::uint8_t>(digit));
    }
    return ds;
}

}  // namespace spikecnn
