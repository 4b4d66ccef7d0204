#include "spikecnn/readout.hpp"

#include <cmath>

#include "spikecnn/errors.hpp"

namespace spikecnn {

void ReadoutConfig::validate() const {
    if (!(eta > 0.0)) throw ValueError("ReadoutConfig: eta must be positive");
    if (!(target_rate_hz > 0.0)) throw ValueError("ReadoutConfig: target_rate_hz must be positive");
    if (target_rate_hz > 1000.0)
        throw ValueError("ReadoutConfig: target_rate_hz above one spike per millisecond step");
}

SpikeRaster make_target(int classes, int label, int window_ms, double target_rate_hz, RngStream& rng) {
    if (classes <= 0) throw ValueError("make_target: classes must be positive");
    if (label < 0 || label >= classes) throw ValueError("make_target: label out of range");
    if (window_ms <= 0) throw ValueError("make_target: window must be positive");
    const double p = target_rate_hz / 1000.0;  // per 1 ms step
    if (p > 1.0) throw ValueError("make_target: target rate exceeds one spike per step");

    SpikeRaster target({classes, 1, 1}, window_ms);
    for (int t = 0; t < window_ms; ++t)
        target.events[static_cast<std::size_t>(t) * classes + label] = rng.bernoulli(p) ? 1 : 0;
    return target;
}

ReadoutTrainer::ReadoutTrainer(DenseMatrix& w, const LifParams& params, const ReadoutConfig& cfg)
    : w_(&w), params_(params), cfg_(cfg) {
    params_.validate();
    cfg_.validate();
    if (w.rows <= 0 || w.cols <= 0) throw ShapeError("ReadoutTrainer: empty readout matrix");
    pop_ = LifPopulation({w.rows, 1, 1}, params_);
    current_.assign(w.rows, 0.0);
    potential_.assign(w.rows, 0.0);
    spikes_.assign(w.rows, 0);
}

void ReadoutTrainer::reset() { reset_population(pop_); }

double ReadoutTrainer::train_step(const std::uint8_t* features, const std::uint8_t* target_frame) {
    DenseMatrix& w = *w_;

    active_.clear();
    for (int i = 0; i < w.cols; ++i)
        if (features[i]) active_.push_back(i);

    for (int j = 0; j < w.rows; ++j) {
        const double* row = w.w.data() + static_cast<std::size_t>(j) * w.cols;
        double acc = 0.0;
        for (int i : active_) acc += row[i];
        current_[j] = acc;
    }
    lif_step(pop_, current_, spikes_, &potential_);

    double sq = 0.0;
    for (int j = 0; j < w.rows; ++j) {
        const double v_des = target_frame[j] ? params_.v_th : params_.v_res;
        const double v = potential_[j];
        const double e = v_des - v;
        sq += e * e;
        if (cfg_.event_gated && !target_frame[j] && !spikes_[j]) continue;
        const double step = cfg_.eta * e * v;
        if (step != 0.0) {
            double* row = w.w.data() + static_cast<std::size_t>(j) * w.cols;
            for (int i : active_) row[i] += step;
        }
    }
    const double loss = sq / (2.0 * w.rows);
    if (!std::isfinite(loss)) throw NumericError("ReadoutTrainer: target error diverged");
    return loss;
}

double ReadoutTrainer::train_window(const SpikeRaster& features, const SpikeRaster& target) {
    if (features.steps != target.steps) throw ShapeError("train_window: feature and target windows differ");
    if (static_cast<int>(features.shape.count()) != w_->cols)
        throw ShapeError("train_window: feature raster does not match the readout");
    if (static_cast<int>(target.shape.count()) != w_->rows)
        throw ShapeError("train_window: target raster does not match the readout");

    reset();
    double loss = 0.0;
    for (int t = 0; t < features.steps; ++t) loss += train_step(features.frame_data(t), target.frame_data(t));
    return loss;
}

Decision decide(std::vector<std::uint64_t> class_counts) {
    if (class_counts.empty()) throw ValueError("decide: no classes");
    Decision d;
    d.label = 0;
    for (int j = 1; j < static_cast<int>(class_counts.size()); ++j)
        if (class_counts[j] > class_counts[static_cast<std::size_t>(d.label)]) d.label = j;
    d.spike_counts = std::move(class_counts);
    return d;
}

}  // namespace spikecnn
