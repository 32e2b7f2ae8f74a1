#ifndef PSENSE_AFE_HPP
#define PSENSE_AFE_HPP

#include "psense/signal.hpp"

namespace psense {

struct AfeConfig {
    int smoothing_steps = 25;   // moving-average window on the derivative path
    int delay_steps = 0;        // analog response latency in grid steps
    double slope_gain = 4.0e-3; // volts of p-neuron drive per volt/second of slope
    double amp_threshold_v = 0.05;

    void validate() const;
};

/// Slope-magnitude and amplitude features on the grid of the source trace.
struct FeatureSignal {
    Eigen::VectorXd slope_mag;  // V/s
    Eigen::VectorXd amplitude;  // V
    double rate_hz = 1.0;
    int delay_steps = 0;

    Index size() const { return slope_mag.size(); }
};

template <typename Scalar>
struct Rectified {
    BasicTrace<Scalar> pos;
    BasicTrace<Scalar> neg;
};

/// Splits `x` into its positive and negative half-waves; `pos - neg == x`.
template <typename Derived>
auto positive_part(const Eigen::MatrixBase<Derived>& x)
{
    return x.cwiseMax(typename Derived::Scalar(0));
}

template <typename Derived>
auto negative_part(const Eigen::MatrixBase<Derived>& x)
{
    return (-x).cwiseMax(typename Derived::Scalar(0));
}

template <typename Scalar>
Rectified<Scalar> half_wave_rectify(const BasicTrace<Scalar>& x)
{
    validate(x);
    Rectified<Scalar> r;
    r.pos = BasicTrace<Scalar>{positive_part(x.samples), x.rate_hz, x.t0_s};
    r.neg = BasicTrace<Scalar>{negative_part(x.samples), x.rate_hz, x.t0_s};
    return r;
}

FeatureSignal extract_features(const Trace& x, const AfeConfig& cfg);

/// p-neuron input voltage at step `i`.
double drive_voltage(const FeatureSignal& f, const AfeConfig& cfg, Index i);

/// Drive voltage for every step.
Eigen::VectorXd drive_voltages(const FeatureSignal& f, const AfeConfig& cfg);

}  // namespace psense

#endif  // PSENSE_AFE_HPP
