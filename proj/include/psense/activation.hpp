#ifndef PSENSE_ACTIVATION_HPP
#define PSENSE_ACTIVATION_HPP

#include "psense/afe.hpp"
#include "psense/pbit.hpp"

#include <optional>
#include <vector>

namespace psense {

using BitVector = Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>;

struct ActivationConfig {
    double sync_rate_hz = 2000.0;
    std::optional<int> hold_steps;  // default: one sync period
    PNeuronConfig pneuron;
    AfeConfig afe;

    /// Grid steps per V_Sync period; throws unless `rate_hz` is an integer multiple.
    int steps_per_tick(double rate_hz) const;
    int hold_steps_for(double rate_hz) const;
    void validate() const;
};

/// Per-step output of the activation unit on the fine grid.
struct ActivationTrace {
    BitVector gate;          // ADC clock enable
    BitVector pneuron_out;
    BitVector det_override;
    std::vector<Index> sync_ticks;
    double rate_hz = 1.0;
    double t0_s = 0.0;
    int steps_per_tick = 1;

    Index size() const { return gate.size(); }
    Index gated_ticks() const;
};

/// Runs features, p-neuron and gating over a fine-grid trace.
ActivationTrace run_activation(const Trace& x_high, const ActivationConfig& cfg);

/// Same sweep with externally supplied p-neuron drive and amplitude feature.
/// Used by the sweeps that pin V_IN directly.
ActivationTrace run_activation_driven(const Eigen::VectorXd& drive_v, const Eigen::VectorXd& amplitude,
                                      double rate_hz, const ActivationConfig& cfg, double t0_s = 0.0);

/// Fraction of gated sync ticks in consecutive windows of `window_ticks`.
Eigen::VectorXd average_rate(const ActivationTrace& a, int window_ticks);

/// Seconds from `onset_step` to the first step where the p-neuron output or
/// the deterministic override is high.
double detection_latency(const ActivationTrace& a, Index onset_step);

}  // namespace psense

#endif  // PSENSE_ACTIVATION_HPP
