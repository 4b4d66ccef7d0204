#include "spikecnn/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spikecnn/errors.hpp"
#include "spikecnn/topology.hpp"

namespace spikecnn {

using nlohmann::json;

void TrainConfig::validate() const {
    parse_topology(topology);  // throws on a malformed string
    lif.validate();
    stack.validate();
    readout.validate();
    if (!(i_rate_hz > 0.0)) throw ConfigError("i_rate_hz must be positive");
    if (window_ms <= 0) throw ConfigError("window_ms must be positive");
    if (presentations <= 0) throw ConfigError("presentations must be positive");
    if (readout_epochs <= 0) throw ConfigError("readout_epochs must be positive");
    if (passes <= 0) throw ConfigError("passes must be positive");
    if (iterations <= 0) throw ConfigError("iterations must be positive");
    if (!(init_lo < init_hi)) throw ConfigError("init_lo must be below init_hi");
    if (!(readout_init_lo < readout_init_hi)) throw ConfigError("readout_init_lo must be below readout_init_hi");
    if (metric_every < 0) throw ConfigError("metric_every must be >= 0");
    if (data_format != "idx" && data_format != "cifar10")
        throw ConfigError("data_format must be 'idx' or 'cifar10'");
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown config key '" + where + it.key() + "'");
    }
}

template <typename T>
void fetch(const json& obj, const std::string& where, const char* key, T& target, std::vector<std::string>& defaulted) {
    if (!obj.contains(key)) {
        defaulted.push_back(where + key);
        return;
    }
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + where + key + "': " + e.what());
    }
}

}  // namespace

LoadedConfig parse_config(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(origin + ": top level must be a JSON object");

    LoadedConfig lc;
    TrainConfig& c = lc.config;
    std::vector<std::string>& d = lc.defaulted;

    check_keys(doc, "", {"topology", "seed", "lif", "encode", "stack", "readout", "eval", "data", "out_dir"});

    fetch(doc, "", "topology", c.topology, d);
    fetch(doc, "", "seed", c.seed, d);
    fetch(doc, "", "out_dir", c.out_dir, d);

    if (doc.contains("lif")) {
        const json& o = doc.at("lif");
        check_keys(o, "lif.", {"tau_rc_ms", "tau_ref_ms", "v_th", "v_res"});
        fetch(o, "lif.", "tau_rc_ms", c.lif.tau_rc, d);
        fetch(o, "lif.", "tau_ref_ms", c.lif.tau_ref, d);
        fetch(o, "lif.", "v_th", c.lif.v_th, d);
        fetch(o, "lif.", "v_res", c.lif.v_res, d);
    } else {
        d.push_back("lif");
    }

    if (doc.contains("encode")) {
        const json& o = doc.at("encode");
        check_keys(o, "encode.", {"i_rate_hz", "window_ms"});
        fetch(o, "encode.", "i_rate_hz", c.i_rate_hz, d);
        fetch(o, "encode.", "window_ms", c.window_ms, d);
    } else {
        d.push_back("encode");
    }

    if (doc.contains("stack")) {
        const json& o = doc.at("stack");
        check_keys(o, "stack.",
                   {"eta", "clip_abs", "per_step", "event_gated", "presentations", "interleave_passes",
                    "cache_features", "init_lo", "init_hi", "metric_every"});
        fetch(o, "stack.", "eta", c.stack.eta, d);
        fetch(o, "stack.", "clip_abs", c.stack.clip_abs, d);
        fetch(o, "stack.", "per_step", c.stack.per_step, d);
        fetch(o, "stack.", "event_gated", c.stack.event_gated, d);
        fetch(o, "stack.", "presentations", c.presentations, d);
        fetch(o, "stack.", "interleave_passes", c.interleave_passes, d);
        fetch(o, "stack.", "cache_features", c.cache_features, d);
        fetch(o, "stack.", "init_lo", c.init_lo, d);
        fetch(o, "stack.", "init_hi", c.init_hi, d);
        fetch(o, "stack.", "metric_every", c.metric_every, d);
    } else {
        d.push_back("stack");
    }

    if (doc.contains("readout")) {
        const json& o = doc.at("readout");
        check_keys(o, "readout.", {"eta", "target_rate_hz", "event_gated", "epochs", "subset", "init_lo", "init_hi"});
        fetch(o, "readout.", "eta", c.readout.eta, d);
        fetch(o, "readout.", "target_rate_hz", c.readout.target_rate_hz, d);
        fetch(o, "readout.", "event_gated", c.readout.event_gated, d);
        fetch(o, "readout.", "epochs", c.readout_epochs, d);
        fetch(o, "readout.", "subset", c.subset, d);
        fetch(o, "readout.", "init_lo", c.readout_init_lo, d);
        fetch(o, "readout.", "init_hi", c.readout_init_hi, d);
    } else {
        d.push_back("readout");
    }

    if (doc.contains("eval")) {
        const json& o = doc.at("eval");
        check_keys(o, "eval.", {"passes", "iterations"});
        fetch(o, "eval.", "passes", c.passes, d);
        fetch(o, "eval.", "iterations", c.iterations, d);
    } else {
        d.push_back("eval");
    }

    if (doc.contains("data")) {
        const json& o = doc.at("data");
        check_keys(o, "data.",
                   {"format", "train_images", "train_labels", "test_images", "test_labels", "train_batches",
                    "test_batches"});
        fetch(o, "data.", "format", c.data_format, d);
        fetch(o, "data.", "train_images", c.train_images, d);
        fetch(o, "data.", "train_labels", c.train_labels, d);
        fetch(o, "data.", "test_images", c.test_images, d);
        fetch(o, "data.", "test_labels", c.test_labels, d);
        fetch(o, "data.", "train_batches", c.train_batches, d);
        fetch(o, "data.", "test_batches", c.test_batches, d);
    } else {
        d.push_back("data");
    }

    try {
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return lc;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::string config_to_json(const TrainConfig& c) {
    json doc;
    doc["topology"] = c.topology;
    doc["seed"] = c.seed;
    doc["out_dir"] = c.out_dir;
    doc["lif"] = {{"tau_rc_ms", c.lif.tau_rc}, {"tau_ref_ms", c.lif.tau_ref}, {"v_th", c.lif.v_th},
                  {"v_res", c.lif.v_res}};
    doc["encode"] = {{"i_rate_hz", c.i_rate_hz}, {"window_ms", c.window_ms}};
    doc["stack"] = {{"eta", c.stack.eta},
                    {"clip_abs", c.stack.clip_abs},
                    {"per_step", c.stack.per_step},
                    {"event_gated", c.stack.event_gated},
                    {"presentations", c.presentations},
                    {"interleave_passes", c.interleave_passes},
                    {"cache_features", c.cache_features},
                    {"init_lo", c.init_lo},
                    {"init_hi", c.init_hi},
                    {"metric_every", c.metric_every}};
    doc["readout"] = {{"eta", c.readout.eta},     {"target_rate_hz", c.readout.target_rate_hz},
                      {"event_gated", c.readout.event_gated},
                      {"epochs", c.readout_epochs}, {"subset", c.subset},
                      {"init_lo", c.readout_init_lo}, {"init_hi", c.readout_init_hi}};
    doc["eval"] = {{"passes", c.passes}, {"iterations", c.iterations}};
    doc["data"] = {{"format", c.data_format},       {"train_images", c.train_images},
                   {"train_labels", c.train_labels}, {"test_images", c.test_images},
                   {"test_labels", c.test_labels},   {"train_batches", c.train_batches},
                   {"test_batches", c.test_batches}};
    return doc.dump(2);
}

}  // namespace spikecnn
