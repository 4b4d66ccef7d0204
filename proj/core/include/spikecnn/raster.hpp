#pragma once

#include <cstdint>
#include <vector>

#include "spikecnn/lif.hpp"

namespace spikecnn {

/// One feature map's spike flags at a single time step.
struct BitGrid {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> v;

    BitGrid() = default;
    BitGrid(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0) {}

    std::uint8_t at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    void set(int r, int c, bool on) { v[static_cast<std::size_t>(r) * cols + c] = on ? 1 : 0; }

    std::size_t count_set() const {
        std::size_t n = 0;
        for (auto b : v) n += b;
        return n;
    }
};

/// Binary spike events for one presentation window, indexed by
/// (map, row, col, step). Storage is step-major so that one step's
/// frame is contiguous.
struct SpikeRaster {
    Shape3 shape;
    int steps = 0;
    std::vector<std::uint8_t> events;

    SpikeRaster() = default;
    SpikeRaster(Shape3 s, int t) : shape(s), steps(t), events(s.count() * t, 0) {}

    std::size_t index(int m, int r, int c, int t) const {
        return ((static_cast<std::size_t>(t) * shape.maps + m) * shape.rows + r) * shape.cols + c;
    }

    bool at(int m, int r, int c, int t) const { return events[index(m, r, c, t)] != 0; }
    void set(int m, int r, int c, int t, bool on) { events[index(m, r, c, t)] = on ? 1 : 0; }

    /// Pointer to the contiguous frame of one step (maps*rows*cols flags).
    const std::uint8_t* frame_data(int t) const { return &events[shape.count() * t]; }
    std::uint8_t* frame_data(int t) { return &events[shape.count() * t]; }

    /// Copy step t into per-map grids; `out` is resized on first use.
    void extract_frame(int t, std::vector<BitGrid>& out) const;

    /// Write per-map grids into step t.
    void store_frame(int t, const std::vector<BitGrid>& frames);

    /// Write one contiguous frame (maps*rows*cols flags) into step t.
    void store_frame(int t, const std::uint8_t* frame);

    std::size_t total_events() const {
        std::size_t n = 0;
        for (auto b : events) n += b;
        return n;
    }

    /// Per-neuron spike counts accumulated over the window, one flat
    /// row-major grid per map.
    std::vector<std::vector<int>> counts_per_map() const;

    /// Total event count of each map over the whole window.
    std::vector<std::uint64_t> events_per_map() const;
};

}  // namespace spikecnn
