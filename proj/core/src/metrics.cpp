#include "spikecnn/metrics.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "spikecnn/errors.hpp"

namespace spikecnn {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace

void MetricsLog::open(const std::string& path) {
    out_.open(path, std::ios::trunc);
    if (!out_) throw IoError("cannot open metrics log " + path);
    out_ << "timestamp,event,layer,pass,index,value\n";
}

void MetricsLog::row(const std::string& event, int layer, int pass, int index, double value) {
    if (!out_.is_open()) return;
    char num[40];
    std::snprintf(num, sizeof num, "%.12g", value);
    out_ << utc_timestamp() << ',' << event << ',' << layer << ',' << pass << ',' << index << ',' << num << '\n';
    out_.flush();
}

SparsityReport measure_sparsity(const SpikeRaster& raster) {
    const std::size_t n = raster.shape.count();
    SparsityReport rep;
    if (n == 0 || raster.steps == 0) return rep;

    std::vector<std::uint8_t> active(n, 0);
    std::uint64_t total = 0;
    for (int t = 0; t < raster.steps; ++t) {
        const std::uint8_t* f = raster.frame_data(t);
        for (std::size_t i = 0; i < n; ++i) {
            active[i] |= f[i];
            total += f[i];
        }
    }
    std::uint64_t on = 0;
    for (std::uint8_t a : active) on += a;
    rep.active_fraction = static_cast<double>(on) / static_cast<double>(n);
    rep.mean_rate_hz = static_cast<double>(total) / (static_cast<double>(n) * raster.steps) * 1000.0;
    return rep;
}

}  // namespace spikecnn
