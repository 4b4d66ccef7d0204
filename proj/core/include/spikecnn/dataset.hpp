#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikecnn/grid.hpp"
#include "spikecnn/image.hpp"
#include "spikecnn/rng.hpp"

namespace spikecnn {

/// A labeled image collection, all images sharing one geometry.
struct Dataset {
    int channels = 0;
    int rows = 0;
    int cols = 0;
    std::vector<Image> images;
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return images.size(); }
};

/// Read an IDX image file (big-endian magic 0x00000803, then count,
/// rows, cols, then count*rows*cols raw bytes). Throws DataError on a
/// wrong magic, truncated payload or trailing bytes, IoError if the
/// file cannot be opened.
std::vector<Image> read_idx_images(const std::string& path);

/// Read an IDX label file (magic 0x00000801, then count, then raw
/// bytes). Labels above `max_label` raise DataError.
std::vector<std::uint8_t> read_idx_labels(const std::string& path, int max_label = 9);

/// Write images/labels back out in the same IDX layouts.
void write_idx_images(const std::string& path, const std::vector<Image>& images);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

/// Load an IDX image/label pair into a dataset, checking the counts
/// agree.
Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path);

/// Read one CIFAR-10 batch file: 10000 records of 3073 bytes (label,
/// then 1024 red, 1024 green, 1024 blue bytes of a 32x32 image). A
/// file size that is not a multiple of 3073 raises DataError.
Dataset read_cifar10_batch(const std::string& path);

/// Deterministically pick `n` entries: shuffle indices with the given
/// stream (Fisher-Yates) and keep the prefix. Requires 0 < n <= size;
/// n = size returns a full permutation.
Dataset take_subset(const Dataset& ds, std::size_t n, RngStream& rng);

/// Write a single-channel image (or an arbitrary double grid, max
/// value scaled to 255) as a binary PGM file.
void write_pgm(const std::string& path, const Grid2D& g);
void write_pgm(const std::string& path, const Image& img, int channel = 0);

/// Read a binary (P5, maxval 255) PGM file back into a grid of raw
/// byte values.
Grid2D read_pgm(const std::string& path);

}  // namespace spikecnn
