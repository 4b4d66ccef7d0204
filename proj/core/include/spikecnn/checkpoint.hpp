#pragma once

#include <cstdint>
#include <string>

#include "spikecnn/topology.hpp"

namespace spikecnn {

/// How far a training run got; stored alongside the weights so a run
/// can be resumed or audited.
struct ProgressCursor {
    std::uint32_t stacks_trained = 0;   ///< conv layers fully trained
    std::uint32_t readout_epochs = 0;   ///< readout epochs completed
    std::uint64_t presentations = 0;    ///< total stimulus windows consumed
};

/// Complete persisted training state.
struct Checkpoint {
    NetworkTopology topology;
    std::string config_json;  ///< canonical snapshot of the run's settings
    ProgressCursor progress;
};

/// Binary layout (all integers little-endian regardless of host):
///
///   8 bytes  magic "SCNNCKPT"
///   u32      format version (currently 1)
///   u32      topology string length, then that many bytes
///   u64      config JSON length, then that many bytes
///   u32 x2   progress: stacks_trained, readout_epochs
///   u64      progress: presentations
///   u32      kernel stack count
///   per stack: u32 out_maps, in_maps, kh, kw, then out*in*kh*kw
///              doubles (IEEE-754 bit patterns, little-endian)
///   u32 x2   readout rows, cols (0,0 when absent), then rows*cols doubles
///
/// Weights round-trip bit-exactly. Errors are typed: IoError when the
/// file cannot be opened or written, DataError for a bad magic,
/// truncation, trailing bytes or dimensions that contradict the
/// topology string, VersionError for an unsupported format version.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace spikecnn
