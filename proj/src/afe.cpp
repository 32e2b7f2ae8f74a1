#include "psense/afe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psense {

void AfeConfig::validate() const
{
    if (smoothing_steps < 1)
        throw Error("smoothing_steps must be >= 1");
    if (delay_steps < 0)
        throw Error("delay_steps must be >= 0");
    if (!(slope_gain > 0.0) || !std::isfinite(slope_gain))
        throw Error("slope_gain must be positive");
    if (!(amp_threshold_v > 0.0))
        throw Error("amp_threshold_v must be positive");
}

namespace {

Eigen::VectorXd delayed(const Eigen::VectorXd& v, int delay)
{
    const Index n = v.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    if (delay < n)
        out.tail(n - delay) = v.head(n - delay);
    return out;
}

}  // namespace

FeatureSignal extract_features(const Trace& x, const AfeConfig& cfg)
{
    cfg.validate();
    validate(x);
    const Index n = x.size();
    if (n < cfg.smoothing_steps + 1)
        throw Error("trace too short for smoothing window (" + std::to_string(n) + " samples)");

    // First difference through the rectified paths: |d| = pos(d) + neg(d).
    Eigen::VectorXd diff = Eigen::VectorXd::Zero(n);
    diff.tail(n - 1) = x.samples.tail(n - 1) - x.samples.head(n - 1);
    const Eigen::VectorXd raw = (positive_part(diff) + negative_part(diff)) * x.rate_hz;

    // Causal moving average over the available differences (index 0 has none).
    Eigen::VectorXd slope = Eigen::VectorXd::Zero(n);
    const Index w = cfg.smoothing_steps;
    for (Index i = 1; i < n; ++i) {
        const Index lo = std::max<Index>(1, i - w + 1);
        slope[i] = raw.segment(lo, i - lo + 1).mean();
    }

    FeatureSignal f;
    f.rate_hz = x.rate_hz;
    f.delay_steps = cfg.delay_steps;
    f.slope_mag = delayed(slope, cfg.delay_steps);
    f.amplitude = delayed(x.samples.cwiseAbs(), cfg.delay_steps);
    return f;
}

double drive_voltage(const FeatureSignal& f, const AfeConfig& cfg, Index i)
{
    if (i < 0 || i >= f.size())
        throw Error("feature index out of range: " + std::to_string(i));
    return cfg.slope_gain * f.slope_mag[i];
}

Eigen::VectorXd drive_voltages(const FeatureSignal& f, const AfeConfig& cfg)
{
    return cfg.slope_gain * f.slope_mag;
}

}  // namespace psense
