#include "spikecnn/topology.hpp"

#include <charconv>
#include <string_view>

#include "spikecnn/errors.hpp"

namespace spikecnn {

Grid2D KernelStack::kernel(int k, int l) const {
    Grid2D g(kh, kw);
    const double* src = w.data() + offset(k, l);
    std::copy(src, src + static_cast<std::size_t>(kh) * kw, g.v.begin());
    return g;
}

void KernelStack::set_kernel(int k, int l, const Grid2D& g) {
    if (g.rows != kh || g.cols != kw)
        throw ShapeError("set_kernel: slice shape mismatch");
    std::copy(g.v.begin(), g.v.end(), w.begin() + offset(k, l));
}

void KernelStack::add_scaled(int k, int l, const Grid2D& g, double scale) {
    if (g.rows != kh || g.cols != kw)
        throw ShapeError("add_scaled: slice shape mismatch");
    double* dst = w.data() + offset(k, l);
    for (std::size_t i = 0; i < g.v.size(); ++i) dst[i] += scale * g.v[i];
}

std::vector<int> NetworkTopology::conv_layer_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(layers.size()); ++i)
        if (layers[i].kind == LayerKind::conv) out.push_back(i);
    return out;
}

int NetworkTopology::feature_count() const {
    Shape3 s = layer_shape(feature_layer_index());
    return static_cast<int>(s.count());
}

int NetworkTopology::conv_input_layer(int conv_idx) const {
    std::vector<int> idx = conv_layer_indices();
    if (conv_idx < 0 || conv_idx >= static_cast<int>(idx.size()))
        throw ValueError("conv_input_layer: no such conv layer");
    return idx[conv_idx] - 1;
}

namespace {

int parse_int(std::string_view s, const std::string& what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValueError("topology: bad integer in " + what + ": '" + std::string(s) + "'");
    if (value <= 0)
        throw ValueError("topology: " + what + " must be positive, got " + std::to_string(value));
    return value;
}

LayerDescriptor parse_input_token(std::string_view tok) {
    // HxW or HxWxC
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t x = tok.find('x', start);
        if (x == std::string_view::npos) {
            parts.push_back(tok.substr(start));
            break;
        }
        parts.push_back(tok.substr(start, x - start));
        start = x + 1;
    }
    if (parts.size() != 2 && parts.size() != 3)
        throw ValueError("topology: input token must be HxW or HxWxC, got '" + std::string(tok) + "'");
    LayerDescriptor d;
    d.kind = LayerKind::input;
    d.rows = parse_int(parts[0], "input height");
    d.cols = parse_int(parts[1], "input width");
    d.maps = parts.size() == 3 ? parse_int(parts[2], "input channels") : 1;
    return d;
}

}  // namespace

NetworkTopology parse_topology(const std::string& text) {
    if (text.empty()) throw ValueError("topology: empty string");

    std::vector<std::string_view> tokens;
    std::string_view sv(text);
    std::size_t start = 0;
    while (true) {
        std::size_t dash = sv.find('-', start);
        if (dash == std::string_view::npos) {
            tokens.push_back(sv.substr(start));
            break;
        }
        tokens.push_back(sv.substr(start, dash - start));
        start = dash + 1;
    }
    if (tokens.size() < 2)
        throw ValueError("topology: need at least an input and an output token");
    for (std::string_view t : tokens)
        if (t.empty()) throw ValueError("topology: empty token in '" + text + "'");

    NetworkTopology topo;
    topo.text = text;
    topo.layers.push_back(parse_input_token(tokens[0]));

    for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::string_view tok = tokens[i];
        const LayerDescriptor& prev = topo.layers.back();
        if (prev.kind == LayerKind::output)
            throw ValueError("topology: output token must be last");

        std::size_t c_pos = tok.find('c');
        if (c_pos != std::string_view::npos) {
            LayerDescriptor d;
            d.kind = LayerKind::conv;
            d.maps = parse_int(tok.substr(0, c_pos), "conv map count");
            d.param = parse_int(tok.substr(c_pos + 1), "conv kernel size");
            if (d.param > prev.rows || d.param > prev.cols)
                throw ShapeError("topology: " + std::to_string(d.param) + "x" + std::to_string(d.param) +
                                 " kernel does not fit a " + std::to_string(prev.rows) + "x" +
                                 std::to_string(prev.cols) + " input");
            d.rows = prev.rows - d.param + 1;
            d.cols = prev.cols - d.param + 1;
            topo.layers.push_back(d);
            continue;
        }
        if (tok.back() == 'a') {
            LayerDescriptor d;
            d.kind = LayerKind::avgpool;
            d.param = parse_int(tok.substr(0, tok.size() - 1), "pool window");
            if (prev.rows % d.param != 0 || prev.cols % d.param != 0)
                throw ShapeError("topology: " + std::to_string(d.param) + "x" + std::to_string(d.param) +
                                 " pooling does not divide a " + std::to_string(prev.rows) + "x" +
                                 std::to_string(prev.cols) + " map");
            d.maps = prev.maps;
            d.rows = prev.rows / d.param;
            d.cols = prev.cols / d.param;
            topo.layers.push_back(d);
            continue;
        }
        if (tok.back() == 'o') {
            if (i != tokens.size() - 1)
                throw ValueError("topology: output token must be last");
            LayerDescriptor d;
            d.kind = LayerKind::output;
            d.maps = 1;
            d.rows = parse_int(tok.substr(0, tok.size() - 1), "output class count");
            d.cols = 1;
            topo.layers.push_back(d);
            continue;
        }
        throw ValueError("topology: unrecognized token '" + std::string(tok) + "'");
    }

    if (topo.layers.back().kind != LayerKind::output)
        throw ValueError("topology: must end with an output token");
    return topo;
}

void init_weights(NetworkTopology& topo, RngStream& rng, double init_lo, double init_hi,
                  double readout_lo, double readout_hi) {
    if (!(init_lo < init_hi) || !(readout_lo < readout_hi))
        throw ValueError("init_weights: need lo < hi for both ranges");

    topo.stacks.clear();
    for (int layer_idx : topo.conv_layer_indices()) {
        const LayerDescriptor& d = topo.layers[layer_idx];
        const LayerDescriptor& prev = topo.layers[layer_idx - 1];
        KernelStack ks(d.maps, prev.maps, d.param, d.param);
        for (double& w : ks.w) w = rng.uniform(init_lo, init_hi);
        topo.stacks.push_back(std::move(ks));
    }

    const LayerDescriptor& out = topo.layers.back();
    topo.readout = DenseMatrix(out.rows, topo.feature_count());
    for (double& w : topo.readout.w) w = rng.uniform(readout_lo, readout_hi);
}

}  // namespace spikecnn
