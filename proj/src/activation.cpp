#include "psense/activation.hpp"

#include <cmath>
#include <string>

namespace psense {

int ActivationConfig::steps_per_tick(double rate_hz) const
{
    if (!(sync_rate_hz > 0.0))
        throw Error("sync rate must be positive");
    const double ratio = rate_hz / sync_rate_hz;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
        throw Error("grid rate " + std::to_string(rate_hz) + " Hz is not an integer multiple of sync rate " +
                    std::to_string(sync_rate_hz) + " Hz");
    return static_cast<int>(rounded);
}

int ActivationConfig::hold_steps_for(double rate_hz) const
{
    return hold_steps.value_or(steps_per_tick(rate_hz));
}

void ActivationConfig::validate() const
{
    if (!(sync_rate_hz > 0.0) || !std::isfinite(sync_rate_hz))
        throw Error("sync rate must be positive");
    if (hold_steps && *hold_steps < 0)
        throw Error("hold_steps must be >= 0");
    pneuron.validate();
    afe.validate();
}

Index ActivationTrace::gated_ticks() const
{
    Index n = 0;
    for (Index i : sync_ticks)
        n += gate[i];
    return n;
}

ActivationTrace run_activation(const Trace& x_high, const ActivationConfig& cfg)
{
    cfg.validate();
    cfg.steps_per_tick(x_high.rate_hz);
    const FeatureSignal f = extract_features(x_high, cfg.afe);
    return run_activation_driven(drive_voltages(f, cfg.afe), f.amplitude, x_high.rate_hz, cfg, x_high.t0_s);
}

ActivationTrace run_activation_driven(const Eigen::VectorXd& drive_v, const Eigen::VectorXd& amplitude,
                                      double rate_hz, const ActivationConfig& cfg, double t0_s)
{
    cfg.validate();
    const Index n = drive_v.size();
    if (n == 0 || amplitude.size() != n)
        throw Error("drive and amplitude must be non-empty and of equal length");

    ActivationTrace a;
    a.rate_hz = rate_hz;
    a.t0_s = t0_s;
    a.steps_per_tick = cfg.steps_per_tick(rate_hz);
    a.gate = BitVector::Zero(n);
    a.pneuron_out = BitVector::Zero(n);
    a.det_override = BitVector::Zero(n);
    a.sync_ticks.reserve(static_cast<std::size_t>(n / a.steps_per_tick + 1));

    const PNeuronConfig& pn = cfg.pneuron;
    const double dt = 1.0 / rate_hz;
    const int hold = cfg.hold_steps_for(rate_hz);
    const double threshold = cfg.afe.amp_threshold_v;

    LfsrState lfsr = lfsr_from_seed(pn.seed);
    TelegraphState mtj = make_telegraph(activation_probability(drive_v[0], pn), pn.seed);
    bool held = false;
    int latch = 0;

    for (Index i = 0; i < n; ++i) {
        const bool tick = i % a.steps_per_tick == 0;
        const double p = activation_probability(drive_v[i], pn);

        bool pbit = false;
        if (pn.source == EntropySource::smtj_telegraph) {
            if (i > 0)
                telegraph_advance(mtj, p, dt, pn.tau_s);
            pbit = mtj.state;
        } else {
            // Only tick decisions reach the AND gate; the value is held between ticks.
            if (tick)
                held = pbit_decide_iid(p, lfsr);
            pbit = held;
        }

        // Stays high for `hold` steps after the last above-threshold step.
        const bool above = amplitude[i] >= threshold;
        bool det = above;
        if (above)
            latch = hold;
        else if (latch > 0) {
            det = true;
            --latch;
        }

        a.pneuron_out[i] = pbit;
        a.det_override[i] = det;
        if (tick) {
            a.sync_ticks.push_back(i);
            a.gate[i] = pbit || det;
        }
    }
    return a;
}

Eigen::VectorXd average_rate(const ActivationTrace& a, int window_ticks)
{
    if (window_ticks < 1)
        throw Error("window must contain at least one tick");
    if (a.sync_ticks.empty())
        throw Error("empty activation trace");
    const auto windows = static_cast<Index>(a.sync_ticks.size()) / window_ticks;
    if (windows == 0)
        throw Error("activation trace shorter than one window");
    Eigen::VectorXd rate(windows);
    for (Index w = 0; w < windows; ++w) {
        Index gated = 0;
        for (Index k = 0; k < window_ticks; ++k)
            gated += a.gate[a.sync_ticks[static_cast<std::size_t>(w * window_ticks + k)]];
        rate[w] = static_cast<double>(gated) / window_ticks;
    }
    return rate;
}

double detection_latency(const ActivationTrace& a, Index onset_step)
{
    if (onset_step < 0 || onset_step >= a.size())
        throw Error("onset step out of range");
    for (Index i = onset_step; i < a.size(); ++i) {
        if (a.pneuron_out[i] || a.det_override[i])
            return static_cast<double>(i - onset_step) / a.rate_hz;
    }
    throw Error("no activation after onset");
}

}  // namespace psense
