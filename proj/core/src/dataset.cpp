#include "spikecnn/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "spikecnn/errors.hpp"

namespace spikecnn {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    return f;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

std::uint32_t read_u32_be(std::istream& f, const std::string& path, const char* what) {
    unsigned char b[4];
    if (!f.read(reinterpret_cast<char*>(b), 4))
        throw DataError(path + ": truncated while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

void expect_eof(std::istream& f, const std::string& path) {
    char c;
    if (f.read(&c, 1)) throw DataError(path + ": trailing bytes after declared payload");
}

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr std::uint32_t kSaneCount = 10'000'000;

}  // namespace

std::vector<Image> read_idx_images(const std::string& path) {
    std::ifstream f = open_input(path);
    const std::uint32_t magic = read_u32_be(f, path, "magic");
    if (magic != kImageMagic)
        throw DataError(path + ": bad image magic (expected 0x00000803)");
    const std::uint32_t count = read_u32_be(f, path, "image count");
    const std::uint32_t rows = read_u32_be(f, path, "row count");
    const std::uint32_t cols = read_u32_be(f, path, "column count");
    if (count > kSaneCount) throw DataError(path + ": implausible image count");
    if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096)
        throw DataError(path + ": implausible image geometry");

    std::vector<Image> images;
    images.reserve(count);
    const std::size_t px = static_cast<std::size_t>(rows) * cols;
    for (std::uint32_t i = 0; i < count; ++i) {
        Image img(1, static_cast<int>(rows), static_cast<int>(cols));
        if (!f.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(px)))
            throw DataError(path + ": truncated at image " + std::to_string(i));
        images.push_back(std::move(img));
    }
    expect_eof(f, path);
    return images;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path, int max_label) {
    std::ifstream f = open_input(path);
    const std::uint32_t magic = read_u32_be(f, path, "magic");
    if (magic != kLabelMagic)
        throw DataError(path + ": bad label magic (expected 0x00000801)");
    const std::uint32_t count = read_u32_be(f, path, "label count");
    if (count > kSaneCount) throw DataError(path + ": implausible label count");

    std::vector<std::uint8_t> labels(count);
    if (count && !f.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(count)))
        throw DataError(path + ": truncated label payload");
    expect_eof(f, path);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] > max_label)
            throw DataError(path + ": label " + std::to_string(int(labels[i])) + " at index " + std::to_string(i) +
                            " exceeds " + std::to_string(max_label));
    return labels;
}

void write_idx_images(const std::string& path, const std::vector<Image>& images) {
    if (images.empty()) throw ValueError("write_idx_images: nothing to write");
    const Image& first = images.front();
    if (first.channels != 1) throw ValueError("write_idx_images: IDX images are single channel");
    std::ofstream f = open_output(path);
    write_u32_be(f, kImageMagic);
    write_u32_be(f, static_cast<std::uint32_t>(images.size()));
    write_u32_be(f, static_cast<std::uint32_t>(first.rows));
    write_u32_be(f, static_cast<std::uint32_t>(first.cols));
    for (const Image& img : images) {
        if (img.rows != first.rows || img.cols != first.cols || img.channels != 1)
            throw ShapeError("write_idx_images: mixed geometries");
        f.write(reinterpret_cast<const char*>(img.px.data()), static_cast<std::streamsize>(img.px.size()));
    }
    if (!f) throw IoError("write failed: " + path);
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream f = open_output(path);
    write_u32_be(f, kLabelMagic);
    write_u32_be(f, static_cast<std::uint32_t>(labels.size()));
    f.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!f) throw IoError("write failed: " + path);
}

Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path) {
    Dataset ds;
    ds.images = read_idx_images(images_path);
    ds.labels = read_idx_labels(labels_path);
    if (ds.images.size() != ds.labels.size())
        throw DataError(images_path + " and " + labels_path + ": image/label counts differ (" +
                        std::to_string(ds.images.size()) + " vs " + std::to_string(ds.labels.size()) + ")");
    if (ds.images.empty()) throw DataError(images_path + ": empty dataset");
    ds.channels = 1;
    ds.rows = ds.images.front().rows;
    ds.cols = ds.images.front().cols;
    return ds;
}

Dataset read_cifar10_batch(const std::string& path) {
    std::ifstream f = open_input(path);
    f.seekg(0, std::ios::end);
    const std::streamoff size = f.tellg();
    f.seekg(0, std::ios::beg);
    constexpr std::streamoff record = 3073;
    if (size <= 0 || size % record != 0)
        throw DataError(path + ": size " + std::to_string(size) + " is not a multiple of 3073-byte records");

    Dataset ds;
    ds.channels = 3;
    ds.rows = 32;
    ds.cols = 32;
    const std::size_t count = static_cast<std::size_t>(size / record);
    ds.images.reserve(count);
    ds.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint8_t label;
        if (!f.read(reinterpret_cast<char*>(&label), 1))
            throw DataError(path + ": truncated record " + std::to_string(i));
        if (label > 9)
            throw DataError(path + ": label " + std::to_string(int(label)) + " out of range in record " +
                            std::to_string(i));
        Image img(3, 32, 32);
        if (!f.read(reinterpret_cast<char*>(img.px.data()), 3072))
            throw DataError(path + ": truncated record " + std::to_string(i));
        ds.labels.push_back(label);
        ds.images.push_back(std::move(img));
    }
    return ds;
}

Dataset take_subset(const Dataset& ds, std::size_t n, RngStream& rng) {
    if (n == 0 || n > ds.size())
        throw ValueError("take_subset: need 0 < n <= " + std::to_string(ds.size()) + ", got " + std::to_string(n));
    std::vector<std::size_t> idx(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);

    Dataset out;
    out.channels = ds.channels;
    out.rows = ds.rows;
    out.cols = ds.cols;
    out.images.reserve(n);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.images.push_back(ds.images[idx[i]]);
        out.labels.push_back(ds.labels[idx[i]]);
    }
    return out;
}

void write_pgm(const std::string& path, const Grid2D& g) {
    if (g.rows <= 0 || g.cols <= 0) throw ShapeError("write_pgm: empty grid");
    double mx = 0.0;
    for (double v : g.v) mx = std::max(mx, v);
    const double scale = mx > 0.0 ? 255.0 / mx : 0.0;

    std::ofstream f = open_output(path);
    f << "P5\n" << g.cols << " " << g.rows << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(g.cols));
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            double v = g.at(r, c) * scale;
            row[static_cast<std::size_t>(c)] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0) + 0.5);
        }
        f.write(reinterpret_cast<const char*>(row.data()), g.cols);
    }
    if (!f) throw IoError("write failed: " + path);
}

void write_pgm(const std::string& path, const Image& img, int channel) {
    if (channel < 0 || channel >= img.channels) throw ValueError("write_pgm: channel out of range");
    Grid2D g(img.rows, img.cols);
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c) g.at(r, c) = img.at(channel, r, c);
    write_pgm(path, g);
}

Grid2D read_pgm(const std::string& path) {
    std::ifstream f = open_input(path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw DataError(path + ": not a binary PGM file");
    int cols = 0, rows = 0, maxval = 0;
    f >> cols >> rows >> maxval;
    if (!f || cols <= 0 || rows <= 0) throw DataError(path + ": bad PGM header");
    if (maxval != 255) throw DataError(path + ": only maxval 255 is supported");
    f.get();  // single whitespace after maxval

    Grid2D g(rows, cols);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    if (!f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw DataError(path + ": truncated pixel payload");
    for (std::size_t i = 0; i < buf.size(); ++i) g.v[i] = buf[i];
    return g;
}

}  // namespace spikecnn
