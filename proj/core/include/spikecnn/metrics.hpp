#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "spikecnn/raster.hpp"

namespace spikecnn {

/// Append-only CSV log of training and evaluation measurements.
///
/// Layout: `timestamp,event,layer,pass,index,value`. The timestamp is
/// the only non-deterministic column and is deliberately placed first
/// so tooling can strip it (`cut -d, -f2-`) when comparing runs; every
/// other column is formatted deterministically. `layer`, `pass` and
/// `index` are -1 when an event has no use for them.
class MetricsLog {
public:
    MetricsLog() = default;
    explicit MetricsLog(const std::string& path) { open(path); }

    void open(const std::string& path);
    bool is_open() const { return out_.is_open(); }

    void row(const std::string& event, int layer, int pass, int index, double value);

private:
    std::ofstream out_;
};

/// Fraction of units that fired at least once over the raster, and the
/// mean firing rate in Hz (dt is 1 ms, so rate = spikes / (units *
/// steps) * 1000).
struct SparsityReport {
    double active_fraction = 0.0;
    double mean_rate_hz = 0.0;
};

SparsityReport measure_sparsity(const SpikeRaster& raster);

}  // namespace spikecnn
