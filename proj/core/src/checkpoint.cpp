#include "spikecnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "spikecnn/errors.hpp"

namespace spikecnn {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
}

void put_doubles(std::ostream& f, const std::vector<double>& v) {
    for (double x : v) put_u64(f, std::bit_cast<std::uint64_t>(x));
}

std::uint32_t get_u32(std::istream& f, const std::string& path, const char* what) {
    unsigned char b[4];
    if (!f.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated reading " + what);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& f, const std::string& path, const char* what) {
    unsigned char b[8];
    if (!f.read(reinterpret_cast<char*>(b), 8)) throw DataError(path + ": truncated reading " + what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

void get_doubles(std::istream& f, const std::string& path, const char* what, std::vector<double>& v) {
    for (double& x : v) x = std::bit_cast<double>(get_u64(f, path, what));
}

constexpr std::uint32_t kMaxDim = 1u << 20;

std::uint32_t checked_dim(std::uint32_t v, const std::string& path, const char* what) {
    if (v > kMaxDim) throw DataError(path + ": implausible " + std::string(what));
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");

    f.write(kMagic, 8);
    put_u32(f, kVersion);
    put_u32(f, static_cast<std::uint32_t>(ck.topology.text.size()));
    f.write(ck.topology.text.data(), static_cast<std::streamsize>(ck.topology.text.size()));
    put_u64(f, ck.config_json.size());
    f.write(ck.config_json.data(), static_cast<std::streamsize>(ck.config_json.size()));
    put_u32(f, ck.progress.stacks_trained);
    put_u32(f, ck.progress.readout_epochs);
    put_u64(f, ck.progress.presentations);

    put_u32(f, static_cast<std::uint32_t>(ck.topology.stacks.size()));
    for (const KernelStack& ks : ck.topology.stacks) {
        put_u32(f, static_cast<std::uint32_t>(ks.out_maps));
        put_u32(f, static_cast<std::uint32_t>(ks.in_maps));
        put_u32(f, static_cast<std::uint32_t>(ks.kh));
        put_u32(f, static_cast<std::uint32_t>(ks.kw));
        put_doubles(f, ks.w);
    }

    const DenseMatrix& r = ck.topology.readout;
    put_u32(f, static_cast<std::uint32_t>(r.rows));
    put_u32(f, static_cast<std::uint32_t>(r.cols));
    put_doubles(f, r.w);

    if (!f) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);

    char magic[8];
    if (!f.read(magic, 8)) throw DataError(path + ": truncated reading magic");
    if (std::memcmp(magic, kMagic, 8) != 0) throw DataError(path + ": not a checkpoint file");

    const std::uint32_t version = get_u32(f, path, "format version");
    if (version != kVersion)
        throw VersionError(path + ": unsupported checkpoint version " + std::to_string(version) + " (expected " +
                           std::to_string(kVersion) + ")");

    Checkpoint ck;
    const std::uint32_t topo_len = checked_dim(get_u32(f, path, "topology length"), path, "topology length");
    std::string topo_text(topo_len, '\0');
    if (topo_len && !f.read(topo_text.data(), topo_len)) throw DataError(path + ": truncated topology string");

    const std::uint64_t cfg_len = get_u64(f, path, "config length");
    if (cfg_len > (1u << 26)) throw DataError(path + ": implausible config length");
    ck.config_json.assign(cfg_len, '\0');
    if (cfg_len && !f.read(ck.config_json.data(), static_cast<std::streamsize>(cfg_len)))
        throw DataError(path + ": truncated config blob");

    ck.progress.stacks_trained = get_u32(f, path, "progress");
    ck.progress.readout_epochs = get_u32(f, path, "progress");
    ck.progress.presentations = get_u64(f, path, "progress");

    try {
        ck.topology = parse_topology(topo_text);
    } catch (const Error& e) {
        throw DataError(path + ": stored topology is invalid: " + e.what());
    }

    const std::uint32_t stack_count = get_u32(f, path, "stack count");
    const std::vector<int> conv_layers = ck.topology.conv_layer_indices();
    if (stack_count != conv_layers.size())
        throw DataError(path + ": stack count " + std::to_string(stack_count) + " does not match topology '" +
                        topo_text + "'");
    for (std::uint32_t s = 0; s < stack_count; ++s) {
        const std::uint32_t out = checked_dim(get_u32(f, path, "stack dims"), path, "stack dims");
        const std::uint32_t in = checked_dim(get_u32(f, path, "stack dims"), path, "stack dims");
        const std::uint32_t kh = checked_dim(get_u32(f, path, "stack dims"), path, "stack dims");
        const std::uint32_t kw = checked_dim(get_u32(f, path, "stack dims"), path, "stack dims");
        const LayerDescriptor& d = ck.topology.layers[conv_layers[s]];
        const LayerDescriptor& prev = ck.topology.layers[conv_layers[s] - 1];
        if (static_cast<int>(out) != d.maps || static_cast<int>(in) != prev.maps ||
            static_cast<int>(kh) != d.param || static_cast<int>(kw) != d.param)
            throw DataError(path + ": stack " + std::to_string(s) + " dimensions contradict the topology");
        KernelStack ks(static_cast<int>(out), static_cast<int>(in), static_cast<int>(kh), static_cast<int>(kw));
        get_doubles(f, path, "kernel weights", ks.w);
        ck.topology.stacks.push_back(std::move(ks));
    }

    const std::uint32_t rrows = checked_dim(get_u32(f, path, "readout dims"), path, "readout dims");
    const std::uint32_t rcols = checked_dim(get_u32(f, path, "readout dims"), path, "readout dims");
    if (rrows != 0 || rcols != 0) {
        const LayerDescriptor& out = ck.topology.layers.back();
        if (static_cast<int>(rrows) != out.rows || static_cast<int>(rcols) != ck.topology.feature_count())
            throw DataError(path + ": readout dimensions contradict the topology");
        ck.topology.readout = DenseMatrix(static_cast<int>(rrows), static_cast<int>(rcols));
        get_doubles(f, path, "readout weights", ck.topology.readout.w);
    }

    char extra;
    if (f.read(&extra, 1)) throw DataError(path + ": trailing bytes after checkpoint payload");
    return ck;
}

}  // namespace spikecnn
