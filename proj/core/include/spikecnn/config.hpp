#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikecnn/lif.hpp"
#include "spikecnn/readout.hpp"
#include "spikecnn/regen.hpp"

namespace spikecnn {

/// Everything a training or evaluation run needs, in one place. The
/// defaults are the stronger of the two parameter sets used throughout
/// (v_th 1.2, 100 Hz input, 250 ms windows); the weaker set (v_th 0.8,
/// 75 Hz) ships as an example config.
struct TrainConfig {
    std::string topology = "28x28-12c5-2a-64c5-2a-10o";
    std::uint64_t seed = 1;

    LifParams lif;          ///< shared by every spiking population
    double i_rate_hz = 100.0;
    int window_ms = 250;

    // Unsupervised stack stage.
    LearnConfig stack;              ///< eta, clipping, update granularity
    int presentations = 3;          ///< back-to-back repeats per image per layer
    bool interleave_passes = false; ///< true: full dataset passes instead of repeats
    bool cache_features = false;    ///< reuse one prefix raster across repeats of an image
    double init_lo = 0.0;           ///< kernel init range
    double init_hi = 1.0;
    int metric_every = 0;           ///< per-image loss rows every N images; 0 = pass totals only

    // Supervised readout stage.
    ReadoutConfig readout;          ///< eta, target rate
    int readout_epochs = 1;
    std::size_t subset = 0;         ///< labeled subset size; 0 = whole training set
    double readout_init_lo = 0.0;
    double readout_init_hi = 0.05;

    // Evaluation protocol.
    int passes = 2;      ///< fresh-raster presentations summed per decision
    int iterations = 5;  ///< whole-test-set repetitions averaged in reports

    // Data sources.
    std::string data_format = "idx";  ///< "idx" or "cifar10"
    std::string train_images, train_labels, test_images, test_labels;
    std::vector<std::string> train_batches, test_batches;  ///< cifar10 only

    std::string out_dir = ".";

    void validate() const;
};

/// Result of reading a config file: the parsed settings plus a note
/// for every key that fell back to its default, so callers can print
/// what was assumed.
struct LoadedConfig {
    TrainConfig config;
    std::vector<std::string> defaulted;
};

/// Parse a JSON config file. Unknown keys anywhere in the document are
/// a ConfigError (misspellings must not silently become defaults);
/// missing keys default and are reported in `defaulted`.
LoadedConfig load_config(const std::string& path);

/// Parse from an already-loaded JSON text (used by tests).
LoadedConfig parse_config(const std::string& json_text, const std::string& origin = "<inline>");

/// Serialize back to canonical JSON (every key explicit). The result
/// parses to an identical TrainConfig and is what checkpoints embed.
std::string config_to_json(const TrainConfig& cfg);

}  // namespace spikecnn
