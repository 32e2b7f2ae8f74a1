#ifndef PSENSE_ACQUISITION_HPP
#define PSENSE_ACQUISITION_HPP

#include "psense/activation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace psense {

enum class AdcKind { p_adc, r_adc };

/// Non-uniform (timestamp, value) samples from a gated or regular ADC.
struct SampleStream {
    Eigen::VectorXd t_s;
    Eigen::VectorXd values;
    AdcKind source = AdcKind::p_adc;

    Index size() const { return t_s.size(); }

    friend bool operator==(const SampleStream& a, const SampleStream& b)
    {
        return a.size() == b.size() && (a.t_s.array() == b.t_s.array()).all() &&
               (a.values.array() == b.values.array()).all();
    }
};

/// Mid-tread uniform quantizer over [-full_scale_v, full_scale_v].
struct Quantizer {
    int bits = 24;
    double full_scale_v = 10.0;

    double operator()(double v) const;
};

/// P-ADC: one sample per gated sync tick. R-ADC: one sample per sync tick.
SampleStream sample(const Trace& x_high, const ActivationTrace& a, AdcKind kind = AdcKind::p_adc,
                    const std::optional<Quantizer>& quantizer = std::nullopt);

/// Piecewise-linear interpolation of the stream onto `grid`, holding the end
/// values outside the sampled span.
Trace reconstruct(const SampleStream& s, const GridSpec& grid);

/// sum((ref - est)^2) / sum(ref^2)
template <typename DerivedA, typename DerivedB>
double nmse(const Eigen::MatrixBase<DerivedA>& reference, const Eigen::MatrixBase<DerivedB>& estimate)
{
    if (reference.size() != estimate.size())
        throw Error("nmse: length mismatch");
    const double energy = reference.squaredNorm();
    if (!(energy > 0.0))
        throw Error("nmse: reference has zero energy");
    return (reference - estimate).squaredNorm() / energy;
}

double nmse_time(const Trace& orig, const Trace& recon);

struct Band {
    double low_hz = 0.0;
    double high_hz = 200.0;
};

/// One-sided DFT magnitude of `x` (rectangular window), bins 0..N/2.
Eigen::VectorXd magnitude_spectrum(const Eigen::VectorXd& x);

/// NMSE of DFT magnitudes over bins with low <= f <= high.
double nmse_freq(const Trace& orig, const Trace& recon, const Band& band);

struct Savings {
    double savings_pct = 0.0;
    double active_time_pct = 0.0;
};

Savings savings(const SampleStream& p, const SampleStream& r);

/// Per-event evaluation record.
struct EventMetrics {
    std::string name;
    double nmse_time = 0.0;
    double nmse_freq = 0.0;
    Index n_samples_p = 0;
    Index n_samples_r = 0;
    double savings_pct = 0.0;
    double active_time_pct = 0.0;
    double window_savings_pct = 0.0;  // inside the event window only
    std::optional<double> latency_s;
    std::optional<std::string> error;
};

struct MetricSummary {
    double mean = 0.0;
    double median = 0.0;
};

struct EvalReport {
    MetricSummary nmse_time;
    MetricSummary nmse_freq;
    MetricSummary savings_pct;
    MetricSummary active_time_pct;
    MetricSummary window_savings_pct;
    MetricSummary latency_s;
    Index n_samples_p = 0;
    Index n_samples_r = 0;
    double total_savings_pct = 0.0;
    std::vector<EventMetrics> per_event;

    Index failed_events() const;
};

/// Indices [first, last] of the R-ADC samples whose magnitude reaches
/// `fraction` of the peak.
std::pair<Index, Index> event_window(const Trace& x, double fraction = 0.1);

/// Metrics for one event. `orig` is the trace on the ADC grid.
EventMetrics evaluate_event(const Trace& orig, const SampleStream& p, const SampleStream& r, const Band& band);

/// Means and medians over the events that completed without error.
EvalReport aggregate(std::vector<EventMetrics> events);

double median(std::vector<double> v);

}  // namespace psense

#endif  // PSENSE_ACQUISITION_HPP
