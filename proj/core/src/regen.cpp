#include "spikecnn/regen.hpp"

#include <algorithm>
#include <cmath>

#include "spikecnn/errors.hpp"

namespace spikecnn {

void LearnConfig::validate() const {
    if (!(eta > 0.0)) throw ValueError("LearnConfig: eta must be positive");
    if (clip_abs < 0.0) throw ValueError("LearnConfig: clip_abs must be >= 0");
}

void encode_current(const std::uint8_t* x, Shape3 in_shape, const KernelStack& ks, std::vector<double>& j_hidden) {
    const int out_rows = in_shape.rows - ks.kh + 1;
    const int out_cols = in_shape.cols - ks.kw + 1;
    if (out_rows <= 0 || out_cols <= 0) throw ShapeError("encode_current: kernel larger than input");
    if (in_shape.maps != ks.in_maps) throw ShapeError("encode_current: map count mismatch");

    j_hidden.assign(static_cast<std::size_t>(ks.out_maps) * out_rows * out_cols, 0.0);

    for (int l = 0; l < in_shape.maps; ++l) {
        const std::uint8_t* map = x + static_cast<std::size_t>(l) * in_shape.rows * in_shape.cols;
        for (int r = 0; r < in_shape.rows; ++r) {
            for (int c = 0; c < in_shape.cols; ++c) {
                if (!map[r * in_shape.cols + c]) continue;
                const int a_lo = std::max(0, r - (out_rows - 1));
                const int a_hi = std::min(ks.kh - 1, r);
                const int b_lo = std::max(0, c - (out_cols - 1));
                const int b_hi = std::min(ks.kw - 1, c);
                for (int k = 0; k < ks.out_maps; ++k) {
                    const double* w = ks.w.data() + ks.offset(k, l);
                    double* dst = j_hidden.data() + static_cast<std::size_t>(k) * out_rows * out_cols;
                    for (int a = a_lo; a <= a_hi; ++a) {
                        double* row = dst + static_cast<std::size_t>(r - a) * out_cols;
                        const double* wrow = w + static_cast<std::size_t>(a) * ks.kw;
                        for (int b = b_lo; b <= b_hi; ++b) row[c - b] += wrow[b];
                    }
                }
            }
        }
    }
}

void decode_current(const std::uint8_t* h, Shape3 hidden_shape, const KernelStack& ks, std::vector<double>& j_visible) {
    if (hidden_shape.maps != ks.out_maps) throw ShapeError("decode_current: map count mismatch");
    const int vis_rows = hidden_shape.rows + ks.kh - 1;
    const int vis_cols = hidden_shape.cols + ks.kw - 1;

    j_visible.assign(static_cast<std::size_t>(ks.in_maps) * vis_rows * vis_cols, 0.0);

    for (int k = 0; k < hidden_shape.maps; ++k) {
        const std::uint8_t* map = h + static_cast<std::size_t>(k) * hidden_shape.rows * hidden_shape.cols;
        for (int u = 0; u < hidden_shape.rows; ++u) {
            for (int v = 0; v < hidden_shape.cols; ++v) {
                if (!map[u * hidden_shape.cols + v]) continue;
                for (int l = 0; l < ks.in_maps; ++l) {
                    const double* w = ks.w.data() + ks.offset(k, l);
                    double* dst = j_visible.data() + static_cast<std::size_t>(l) * vis_rows * vis_cols;
                    for (int a = 0; a < ks.kh; ++a) {
                        double* row = dst + static_cast<std::size_t>(u + a) * vis_cols + v;
                        const double* wrow = w + static_cast<std::size_t>(a) * ks.kw;
                        for (int b = 0; b < ks.kw; ++b) row[b] += wrow[b];
                    }
                }
            }
        }
    }
}

void desired_potential(const std::uint8_t* x, std::size_t n, double v_th, double v_res, std::vector<double>& v_des) {
    v_des.resize(n);
    for (std::size_t i = 0; i < n; ++i) v_des[i] = x[i] ? v_th : v_res;
}

void delta_output(const std::vector<double>& v_des, const std::vector<double>& y_pre, std::vector<double>& delta_y) {
    if (v_des.size() != y_pre.size()) throw ShapeError("delta_output: size mismatch");
    delta_y.resize(v_des.size());
    for (std::size_t i = 0; i < v_des.size(); ++i) delta_y[i] = (v_des[i] - y_pre[i]) * y_pre[i];
}

void delta_hidden(const std::vector<double>& delta_y, Shape3 in_shape, const KernelStack& ks,
                  const std::vector<double>& h_pre, Shape3 hidden_shape, std::vector<double>& delta_h) {
    if (hidden_shape.maps != ks.out_maps || in_shape.maps != ks.in_maps)
        throw ShapeError("delta_hidden: map count mismatch");
    if (delta_y.size() != in_shape.count() || h_pre.size() != hidden_shape.count())
        throw ShapeError("delta_hidden: buffer size mismatch");

    delta_h.assign(hidden_shape.count(), 0.0);
    const int hr = hidden_shape.rows, hc = hidden_shape.cols;
    const int ic = in_shape.cols;

#pragma omp parallel for schedule(static)
    for (int k = 0; k < ks.out_maps; ++k) {
        double* dst = delta_h.data() + static_cast<std::size_t>(k) * hr * hc;
        const double* gate = h_pre.data() + static_cast<std::size_t>(k) * hr * hc;
        for (int l = 0; l < ks.in_maps; ++l) {
            const double* w = ks.w.data() + ks.offset(k, l);
            const double* dy = delta_y.data() + static_cast<std::size_t>(l) * in_shape.rows * ic;
            for (int u = 0; u < hr; ++u) {
                for (int v = 0; v < hc; ++v) {
                    double acc = 0.0;
                    for (int a = 0; a < ks.kh; ++a) {
                        const double* dyrow = dy + static_cast<std::size_t>(u + a) * ic + v;
                        const double* wrow = w + static_cast<std::size_t>(a) * ks.kw;
                        for (int b = 0; b < ks.kw; ++b) acc += dyrow[b] * wrow[b];
                    }
                    dst[u * hc + v] += acc;
                }
            }
        }
        for (int i = 0; i < hr * hc; ++i) dst[i] *= gate[i];
    }
}

void conv_ae_gradient(const std::uint8_t* x, Shape3 in_shape, const std::vector<double>& delta_h,
                      const std::uint8_t* h, Shape3 hidden_shape, const std::vector<double>& delta_y,
                      const KernelStack& ks, KernelStack& grad) {
    if (grad.out_maps != ks.out_maps || grad.in_maps != ks.in_maps || grad.kh != ks.kh || grad.kw != ks.kw)
        throw ShapeError("conv_ae_gradient: gradient stack shape mismatch");
    const int hr = hidden_shape.rows, hc = hidden_shape.cols;
    const int ir = in_shape.rows, ic = in_shape.cols;

    // Encoder term: an input spike at (l, r, c) pairs with hidden delta
    // delta_h[k][r-a][c-b] on the synapse (a, b).
    for (int l = 0; l < in_shape.maps; ++l) {
        const std::uint8_t* map = x + static_cast<std::size_t>(l) * ir * ic;
        for (int r = 0; r < ir; ++r) {
            for (int c = 0; c < ic; ++c) {
                if (!map[r * ic + c]) continue;
                const int a_lo = std::max(0, r - (hr - 1));
                const int a_hi = std::min(ks.kh - 1, r);
                const int b_lo = std::max(0, c - (hc - 1));
                const int b_hi = std::min(ks.kw - 1, c);
                for (int k = 0; k < ks.out_maps; ++k) {
                    const double* dh = delta_h.data() + static_cast<std::size_t>(k) * hr * hc;
                    double* g = grad.w.data() + grad.offset(k, l);
                    for (int a = a_lo; a <= a_hi; ++a) {
                        const double* dhrow = dh + static_cast<std::size_t>(r - a) * hc;
                        double* grow = g + static_cast<std::size_t>(a) * ks.kw;
                        for (int b = b_lo; b <= b_hi; ++b) grow[b] += dhrow[c - b];
                    }
                }
            }
        }
    }

    // Decoder term: a hidden spike at (k, u, v) pairs with the visible
    // delta delta_y[l][u+a][v+b] on the same synapse (a, b).
    for (int k = 0; k < hidden_shape.maps; ++k) {
        const std::uint8_t* map = h + static_cast<std::size_t>(k) * hr * hc;
        for (int u = 0; u < hr; ++u) {
            for (int v = 0; v < hc; ++v) {
                if (!map[u * hc + v]) continue;
                for (int l = 0; l < ks.in_maps; ++l) {
                    const double* dy = delta_y.data() + static_cast<std::size_t>(l) * ir * ic;
                    double* g = grad.w.data() + grad.offset(k, l);
                    for (int a = 0; a < ks.kh; ++a) {
                        const double* dyrow = dy + static_cast<std::size_t>(u + a) * ic + v;
                        double* grow = g + static_cast<std::size_t>(a) * ks.kw;
                        for (int b = 0; b < ks.kw; ++b) grow[b] += dyrow[b];
                    }
                }
            }
        }
    }
}

void apply_update(KernelStack& ks, const KernelStack& grad, const LearnConfig& cfg) {
    for (std::size_t i = 0; i < ks.w.size(); ++i) {
        double w = ks.w[i] + cfg.eta * grad.w[i];
        if (cfg.clip_abs > 0.0) w = std::clamp(w, -cfg.clip_abs, cfg.clip_abs);
        ks.w[i] = w;
    }
    for (double w : ks.w)
        if (!std::isfinite(w)) throw NumericError("apply_update: non-finite weight after update");
}

LayerTrainer::LayerTrainer(KernelStack& stack, Shape3 input_shape, const LifParams& params, const LearnConfig& cfg)
    : ks_(&stack),
      in_shape_(input_shape),
      params_(params),
      cfg_(cfg),
      grad_(stack.out_maps, stack.in_maps, stack.kh, stack.kw) {
    params_.validate();
    cfg_.validate();
    if (input_shape.maps != stack.in_maps)
        throw ShapeError("LayerTrainer: input maps do not match the kernel stack");
    if (stack.kh > input_shape.rows || stack.kw > input_shape.cols)
        throw ShapeError("LayerTrainer: kernel larger than input");

    hidden_shape_ = {stack.out_maps, input_shape.rows - stack.kh + 1, input_shape.cols - stack.kw + 1};
    hidden_pop_ = LifPopulation(hidden_shape_, params_);
    visible_pop_ = LifPopulation(in_shape_, params_);
    h_pre_.assign(hidden_shape_.count(), 0.0);
    y_pre_.assign(in_shape_.count(), 0.0);
    h_spikes_.assign(hidden_shape_.count(), 0);
    y_spikes_.assign(in_shape_.count(), 0);
}

void LayerTrainer::reset() {
    reset_population(hidden_pop_);
    reset_population(visible_pop_);
    std::fill(h_spikes_.begin(), h_spikes_.end(), 0);
    std::fill(y_spikes_.begin(), y_spikes_.end(), 0);
    std::fill(h_pre_.begin(), h_pre_.end(), 0.0);
    std::fill(y_pre_.begin(), y_pre_.end(), 0.0);
    std::fill(grad_.w.begin(), grad_.w.end(), 0.0);
}

RegenStepStats LayerTrainer::run_step(const std::uint8_t* x, bool learn) {
    encode_current(x, in_shape_, *ks_, j_hidden_);
    lif_step(hidden_pop_, j_hidden_, h_spikes_, &h_pre_);

    decode_current(h_spikes_.data(), hidden_shape_, *ks_, j_visible_);
    lif_step(visible_pop_, j_visible_, y_spikes_, &y_pre_);

    const std::size_t n = in_shape_.count();
    desired_potential(x, n, params_.v_th, params_.v_res, v_des_);

    RegenStepStats stats;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = v_des_[i] - y_pre_[i];
        sq += e * e;
    }
    stats.loss = sq / (2.0 * static_cast<double>(n));
    if (!std::isfinite(stats.loss)) throw NumericError("LayerTrainer: regeneration loss diverged");

    for (std::size_t i = 0; i < n; ++i) stats.input_spikes += x[i];
    for (std::uint8_t s : h_spikes_) stats.hidden_spikes += s;
    for (std::uint8_t s : y_spikes_) stats.visible_spikes += s;

    if (learn) {
        delta_output(v_des_, y_pre_, delta_y_);
        if (cfg_.event_gated) {
            // A unit participates this step only if its target train spiked
            // (pull toward v_th) or it fired itself (push a false regeneration
            // back down). Quiet units carry no error.
            for (std::size_t i = 0; i < n; ++i)
                if (!x[i] && !y_spikes_[i]) delta_y_[i] = 0.0;
        }
        delta_hidden(delta_y_, in_shape_, *ks_, h_pre_, hidden_shape_, delta_h_);
        conv_ae_gradient(x, in_shape_, delta_h_, h_spikes_.data(), hidden_shape_, delta_y_, *ks_, grad_);
        if (cfg_.per_step) {
            apply_update(*ks_, grad_, cfg_);
            std::fill(grad_.w.begin(), grad_.w.end(), 0.0);
        }
    }
    return stats;
}

RegenStepStats LayerTrainer::train_step(const std::uint8_t* input_frame) { return run_step(input_frame, true); }

RegenStepStats LayerTrainer::observe_step(const std::uint8_t* input_frame) { return run_step(input_frame, false); }

RegenWindowStats LayerTrainer::train_window(const SpikeRaster& input) {
    if (!(input.shape == in_shape_)) throw ShapeError("train_window: raster shape mismatch");
    reset();
    RegenWindowStats ws;
    for (int t = 0; t < input.steps; ++t) {
        RegenStepStats s = train_step(input.frame_data(t));
        ws.loss_sum += s.loss;
        ws.input_spikes += s.input_spikes;
        ws.hidden_spikes += s.hidden_spikes;
        ws.visible_spikes += s.visible_spikes;
        ++ws.steps;
    }
    if (!cfg_.per_step) {
        apply_update(*ks_, grad_, cfg_);
        std::fill(grad_.w.begin(), grad_.w.end(), 0.0);
    }
    return ws;
}

RegenWindowStats LayerTrainer::observe_window(const SpikeRaster& input, SpikeRaster* regenerated) {
    if (!(input.shape == in_shape_)) throw ShapeError("observe_window: raster shape mismatch");
    if (regenerated) *regenerated = SpikeRaster(in_shape_, input.steps);
    reset();
    RegenWindowStats ws;
    for (int t = 0; t < input.steps; ++t) {
        RegenStepStats s = observe_step(input.frame_data(t));
        ws.loss_sum += s.loss;
        ws.input_spikes += s.input_spikes;
        ws.hidden_spikes += s.hidden_spikes;
        ws.visible_spikes += s.visible_spikes;
        ++ws.steps;
        if (regenerated) regenerated->store_frame(t, y_spikes_.data());
    }
    return ws;
}

double window_count_error(const SpikeRaster& input, const SpikeRaster& regenerated) {
    if (!(input.shape == regenerated.shape) || input.steps != regenerated.steps)
        throw ShapeError("window_count_error: rasters do not match");
    const std::size_t n = input.shape.count();
    std::vector<std::uint64_t> cin(n, 0), crec(n, 0);
    for (int t = 0; t < input.steps; ++t) {
        const std::uint8_t* a = input.frame_data(t);
        const std::uint8_t* b = regenerated.frame_data(t);
        for (std::size_t i = 0; i < n; ++i) {
            cin[i] += a[i];
            crec[i] += b[i];
        }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(cin[i]) - static_cast<double>(crec[i]);
        err += d * d;
    }
    return err;
}

}  // namespace spikecnn
