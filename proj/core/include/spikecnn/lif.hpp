#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spikecnn {

/// Leaky integrate-and-fire parameters, shared by every neuron of a
/// population. Potentials are unitless; times are milliseconds.
///
/// tau_rc, tau_ref and v_res are not dictated by any experiment
/// protocol, so they default to standard values and every one of them
/// can be overridden through the config.
struct LifParams {
    double tau_rc = 20.0;   ///< membrane time constant [ms]
    double tau_ref = 1.0;   ///< refractory period [ms]
    double v_th = 1.2;      ///< firing threshold
    double v_res = 0.0;     ///< reset potential
    double dt = 1.0;        ///< step size [ms], fixed at 1.0

    /// Number of simulation steps a neuron stays refractory.
    int refractory_steps() const;

    /// Throws ValueError unless tau_rc > 0, tau_ref >= 0, v_th > v_res
    /// and dt == 1.0.
    void validate() const;
};

/// Geometry of a neuron population: feature maps of rows x cols neurons.
struct Shape3 {
    int maps = 0;
    int rows = 0;
    int cols = 0;

    std::size_t count() const { return static_cast<std::size_t>(maps) * rows * cols; }
    bool operator==(const Shape3&) const = default;
};

/// State of one LIF population: per-neuron membrane potential and
/// remaining refractory steps. Owned and stepped by one logical thread;
/// distinct populations may be stepped concurrently.
struct LifPopulation {
    Shape3 shape;
    LifParams params;
    std::vector<double> v;         ///< membrane potentials
    std::vector<int> ref_count;    ///< remaining refractory steps, >= 0

    LifPopulation() = default;
    LifPopulation(Shape3 s, LifParams p);

    std::size_t count() const { return shape.count(); }

    /// True when every neuron sits at v_res with no refractory debt.
    bool at_reset() const;
};

/// Advance a population by one step of the discretized membrane
/// equation  tau_rc * dv/dt = -v + J  (forward Euler, dt = 1 ms).
///
/// Non-refractory neurons integrate v += (dt/tau_rc) * (J - v); any
/// neuron whose integrated potential reaches v_th (>= comparison) emits
/// a spike, then holds v_res for refractory_steps() further steps.
/// Refractory neurons stay at v_res, never spike, and take no input.
///
/// `spikes_out` is resized to the population and receives 0/1 flags.
/// `integrated_out`, when given, receives the potential each neuron
/// reached this step before any spike reset. That pre-reset value is
/// what gets compared against the threshold, and it is the quantity
/// downstream consumers (average pooling, the learning rules) read as
/// the neuron's activation at this instant.
///
/// Throws ShapeError when `current` does not match the population.
void lif_step(LifPopulation& pop, std::span<const double> current,
              std::vector<std::uint8_t>& spikes_out,
              std::vector<double>* integrated_out = nullptr);

/// Convenience overload returning the spike flags.
std::vector<std::uint8_t> lif_step(LifPopulation& pop, std::span<const double> current);

/// Weighted sum of one neuron's presynaptic spikes at the current step:
/// J = sum_i w[i] * spikes[i]. Spans must have equal length.
double synaptic_current(std::span<const double> weights, std::span<const std::uint8_t> spikes);

/// Return every neuron to v_res with an empty refractory counter.
/// Applied before each presentation window.
void reset_population(LifPopulation& pop);

}  // namespace spikecnn
