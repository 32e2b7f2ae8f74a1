#ifndef PSENSE_SIGNAL_HPP
#define PSENSE_SIGNAL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psense {

using Index = Eigen::Index;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniformly sampled real-valued signal. `samples[i]` is taken at
/// `t0_s + i / rate_hz`.
template <typename Scalar>
struct BasicTrace {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector samples;
    double rate_hz = 1.0;
    double t0_s = 0.0;

    Index size() const { return samples.size(); }
    double dt() const { return 1.0 / rate_hz; }
    double time_at(Index i) const { return t0_s + static_cast<double>(i) / rate_hz; }
    double duration() const { return static_cast<double>(size()) / rate_hz; }

    friend bool operator==(const BasicTrace& a, const BasicTrace& b)
    {
        return a.rate_hz == b.rate_hz && a.t0_s == b.t0_s && a.samples.size() == b.samples.size() &&
               (a.samples.array() == b.samples.array()).all();
    }
};

using Trace = BasicTrace<double>;

/// Grid description used when a trace has to be rebuilt on a known grid.
struct GridSpec {
    double rate_hz = 1.0;
    Index length = 0;
    double t0_s = 0.0;
};

template <typename Scalar>
GridSpec grid_of(const BasicTrace<Scalar>& t)
{
    return {t.rate_hz, t.size(), t.t0_s};
}

/// Throws unless the trace is non-empty, has a positive rate and finite values.
template <typename Scalar>
void validate(const BasicTrace<Scalar>& t)
{
    if (!(t.rate_hz > 0.0) || !std::isfinite(t.rate_hz))
        throw Error("trace rate must be positive and finite");
    if (!std::isfinite(t.t0_s))
        throw Error("trace start time must be finite");
    if (t.samples.size() == 0)
        throw Error("trace is empty");
    if (!t.samples.allFinite())
        throw Error("trace contains non-finite values");
}

template <typename Scalar>
BasicTrace<Scalar> make_trace(typename BasicTrace<Scalar>::Vector samples, double rate_hz, double t0_s = 0.0)
{
    BasicTrace<Scalar> t{std::move(samples), rate_hz, t0_s};
    validate(t);
    return t;
}

inline Trace make_trace(Eigen::VectorXd samples, double rate_hz, double t0_s = 0.0)
{
    return make_trace<double>(std::move(samples), rate_hz, t0_s);
}

/// Linear interpolation onto a grid `factor` times finer. Original sample `i`
/// lands on index `i * factor`; the output has `(n - 1) * factor + 1` samples.
template <typename Scalar>
BasicTrace<Scalar> upsample(const BasicTrace<Scalar>& trace, int factor)
{
    if (factor < 1)
        throw Error("upsample factor must be >= 1");
    validate(trace);
    const Index n = trace.size();
    BasicTrace<Scalar> out;
    out.rate_hz = trace.rate_hz * factor;
    out.t0_s = trace.t0_s;
    if (factor == 1) {
        out.samples = trace.samples;
        return out;
    }
    out.samples.resize((n - 1) * factor + 1);
    for (Index i = 0; i + 1 < n; ++i) {
        const Scalar a = trace.samples[i];
        const Scalar b = trace.samples[i + 1];
        out.samples[i * factor] = a;
        for (int k = 1; k < factor; ++k) {
            const Scalar w = Scalar(k) / Scalar(factor);
            out.samples[i * factor + k] = std::clamp(a + w * (b - a), std::min(a, b), std::max(a, b));
        }
    }
    out.samples[(n - 1) * factor] = trace.samples[n - 1];
    return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

enum class TraceFormat { csv };

/// Reads a trace from CSV. Accepted headers are `time_s,value` and `value`;
/// the latter needs `rate_hz` from the caller. Timestamps must be uniform
/// within 1 ppm of the mean step.
Trace load_trace(const std::filesystem::path& path, TraceFormat format = TraceFormat::csv,
                 std::optional<double> rate_hz = std::nullopt);

/// Writes `time_s,value` rows with round-trip precision.
void write_trace(const Trace& trace, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic active-seismic events

struct RickerEvent {
    double duration_s = 2.0;
    double rate_hz = 2000.0;
    double wavelet_f0_hz = 30.0;
    double onset_s = 1.0;  // wavelet centre
    double amplitude = 1.0;
    double noise_rms = 0.0;
};

double ricker(double t, double f0_hz);

/// Ricker wavelet centred at `onset_s` scaled so its largest sample is
/// `amplitude`, plus white Gaussian noise of RMS `noise_rms`.
Trace synth_event(const RickerEvent& ev, std::uint64_t seed);

struct SurveyDataset {
    std::vector<Trace> events;
    std::vector<std::string> names;
    std::string label;
};

/// Parameters of the synthetic stand-in survey.
struct SurveySpec {
    int n_events = 50;
    double duration_s = 2.0;
    double rate_hz = 2000.0;
    double f0_min_hz = 25.0;
    double f0_max_hz = 35.0;
    double onset_min_s = 0.4;
    double onset_max_s = 1.6;
    double amplitude = 1.0;
    double snr_db = 26.0;  // energy ratio sum(signal^2) / sum(noise^2)
};

SurveyDataset synth_survey(const SurveySpec& spec, std::uint64_t seed);

/// Loads every `*.csv` in `dir` in lexicographic order, one event per file.
SurveyDataset load_survey(const std::filesystem::path& dir, std::optional<double> rate_hz = std::nullopt);

void write_survey(const SurveyDataset& survey, const std::filesystem::path& dir);

}  // namespace psense

#endif  // PSENSE_SIGNAL_HPP
