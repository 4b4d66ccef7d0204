#include "spikecnn/lif.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikecnn/errors.hpp"

namespace spikecnn {

int LifParams::refractory_steps() const {
    return static_cast<int>(std::ceil(tau_ref / dt));
}

void LifParams::validate() const {
    if (!(tau_rc > 0.0)) {
        throw ValueError("LifParams: tau_rc must be positive");
    }
    if (!(tau_ref >= 0.0)) {
        throw ValueError("LifParams: tau_ref must be non-negative");
    }
    if (!(v_th > v_res)) {
        throw ValueError("LifParams: v_th must exceed v_res");
    }
    if (dt != 1.0) {
        throw ValueError("LifParams: dt is fixed at 1.0 ms");
    }
}

LifPopulation::LifPopulation(Shape3 s, LifParams p)
    : shape(s), params(p), v(s.count(), p.v_res), ref_count(s.count(), 0) {}

bool LifPopulation::at_reset() const {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != params.v_res || ref_count[i] != 0) {
            return false;
        }
    }
    return true;
}

void lif_step(LifPopulation& pop, std::span<const double> current,
              std::vector<std::uint8_t>& spikes_out, std::vector<double>* integrated_out) {
    const std::size_t n = pop.count();
    if (current.size() != n) {
        throw ShapeError("lif_step: current has " + std::to_string(current.size()) +
                         " entries, population has " + std::to_string(n));
    }
    spikes_out.resize(n);
    if (integrated_out != nullptr) {
        integrated_out->resize(n);
    }

    const double leak = pop.params.dt / pop.params.tau_rc;
    const double v_th = pop.params.v_th;
    const double v_res = pop.params.v_res;
    const int ref_steps = pop.params.refractory_steps();

    for (std::size_t i = 0; i < n; ++i) {
        if (pop.ref_count[i] > 0) {
            // input arriving during the refractory window is discarded
            --pop.ref_count[i];
            pop.v[i] = v_res;
            spikes_out[i] = 0;
            if (integrated_out != nullptr) {
                (*integrated_out)[i] = v_res;
            }
            continue;
        }
        const double v_new = pop.v[i] + leak * (current[i] - pop.v[i]);
        if (integrated_out != nullptr) {
            (*integrated_out)[i] = v_new;
        }
        if (v_new >= v_th) {
            spikes_out[i] = 1;
            pop.v[i] = v_res;
            pop.ref_count[i] = ref_steps;
        } else {
            spikes_out[i] = 0;
            pop.v[i] = v_new;
        }
    }
}

std::vector<std::uint8_t> lif_step(LifPopulation& pop, std::span<const double> current) {
    std::vector<std::uint8_t> spikes;
    lif_step(pop, current, spikes);
    return spikes;
}

double synaptic_current(std::span<const double> weights, std::span<const std::uint8_t> spikes) {
    if (weights.size() != spikes.size()) {
        throw ShapeError("synaptic_current: " + std::to_string(weights.size()) + " weights vs " +
                         std::to_string(spikes.size()) + " spike flags");
    }
    double j = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (spikes[i]) {
            j += weights[i];
        }
    }
    return j;
}

void reset_population(LifPopulation& pop) {
    std::fill(pop.v.begin(), pop.v.end(), pop.params.v_res);
    std::fill(pop.ref_count.begin(), pop.ref_count.end(), 0);
}

}  // namespace spikecnn
