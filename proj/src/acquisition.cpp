#include "psense/acquisition.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>

namespace psense {

double Quantizer::operator()(double v) const
{
    if (bits < 2 || bits > 52 || !(full_scale_v > 0.0))
        throw Error("quantizer needs 2..52 bits and a positive full scale");
    const double levels = std::ldexp(1.0, bits - 1) - 1.0;
    const double lsb = full_scale_v / levels;
    return std::clamp(std::round(v / lsb), -levels, levels) * lsb;
}

SampleStream sample(const Trace& x_high, const ActivationTrace& a, AdcKind kind,
                    const std::optional<Quantizer>& quantizer)
{
    validate(x_high);
    if (a.size() != x_high.size() || a.rate_hz != x_high.rate_hz)
        throw Error("activation trace does not match the signal grid");

    std::vector<Index> picked;
    picked.reserve(a.sync_ticks.size());
    for (Index i : a.sync_ticks) {
        if (kind == AdcKind::r_adc || a.gate[i])
            picked.push_back(i);
    }

    SampleStream s;
    s.source = kind;
    s.t_s.resize(static_cast<Index>(picked.size()));
    s.values.resize(static_cast<Index>(picked.size()));
    for (Index k = 0; k < s.size(); ++k) {
        const Index i = picked[static_cast<std::size_t>(k)];
        s.t_s[k] = x_high.time_at(i);
        s.values[k] = quantizer ? (*quantizer)(x_high.samples[i]) : x_high.samples[i];
    }
    return s;
}

namespace {

// Sample times as fractional grid positions, snapped to the grid when they
// sit on it up to rounding.
Eigen::VectorXd grid_positions(const SampleStream& s, const GridSpec& grid)
{
    Eigen::VectorXd u = (s.t_s.array() - grid.t0_s) * grid.rate_hz;
    for (Index k = 0; k < u.size(); ++k) {
        const double r = std::round(u[k]);
        if (std::abs(u[k] - r) < 1e-6)
            u[k] = r;
    }
    return u;
}

}  // namespace

Trace reconstruct(const SampleStream& s, const GridSpec& grid)
{
    if (s.size() < 2)
        throw Error("reconstruction needs at least 2 samples");
    if (grid.length < 1 || !(grid.rate_hz > 0.0))
        throw Error("invalid reconstruction grid");
    const Eigen::VectorXd u = grid_positions(s, grid);
    for (Index k = 1; k < u.size(); ++k) {
        if (!(u[k] > u[k - 1]))
            throw Error("sample timestamps must be strictly increasing");
    }

    Trace out;
    out.rate_hz = grid.rate_hz;
    out.t0_s = grid.t0_s;
    out.samples.resize(grid.length);
    const Index last = s.size() - 1;
    Index k = 0;
    for (Index g = 0; g < grid.length; ++g) {
        const double x = static_cast<double>(g);
        if (x <= u[0]) {
            out.samples[g] = s.values[0];
            continue;
        }
        if (x >= u[last]) {
            out.samples[g] = s.values[last];
            continue;
        }
        while (u[k + 1] < x)
            ++k;
        if (x == u[k + 1]) {
            out.samples[g] = s.values[k + 1];
            continue;
        }
        const double w = (x - u[k]) / (u[k + 1] - u[k]);
        out.samples[g] = s.values[k] + w * (s.values[k + 1] - s.values[k]);
    }
    return out;
}

namespace {

void check_same_grid(const Trace& a, const Trace& b)
{
    validate(a);
    validate(b);
    if (a.size() != b.size() || a.rate_hz != b.rate_hz)
        throw Error("traces differ in length or rate");
}

}  // namespace

double nmse_time(const Trace& orig, const Trace& recon)
{
    check_same_grid(orig, recon);
    return nmse(orig.samples, recon.samples);
}

Eigen::VectorXd magnitude_spectrum(const Eigen::VectorXd& x)
{
    Eigen::FFT<double> fft;
    std::vector<double> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);
    const Index bins = x.size() / 2 + 1;
    Eigen::VectorXd mag(bins);
    for (Index k = 0; k < bins; ++k)
        mag[k] = std::abs(spec[static_cast<std::size_t>(k)]);
    return mag;
}

double nmse_freq(const Trace& orig, const Trace& recon, const Band& band)
{
    check_same_grid(orig, recon);
    const double nyquist = orig.rate_hz / 2.0;
    if (!(band.low_hz >= 0.0 && band.high_hz >= band.low_hz && band.high_hz <= nyquist))
        throw Error("band must satisfy 0 <= low <= high <= Nyquist");

    const Eigen::VectorXd a = magnitude_spectrum(orig.samples);
    const Eigen::VectorXd b = magnitude_spectrum(recon.samples);
    const double df = orig.rate_hz / static_cast<double>(orig.size());
    const auto lo = static_cast<Index>(std::ceil(band.low_hz / df - 1e-9));
    const auto hi = std::min<Index>(static_cast<Index>(std::floor(band.high_hz / df + 1e-9)), a.size() - 1);
    if (hi < lo)
        throw Error("band contains no DFT bins");
    const double energy = a.segment(lo, hi - lo + 1).squaredNorm();
    if (!(energy > 0.0))
        throw Error("original has zero in-band energy");
    return nmse(a.segment(lo, hi - lo + 1), b.segment(lo, hi - lo + 1));
}

Savings savings(const SampleStream& p, const SampleStream& r)
{
    if (r.size() == 0)
        throw Error("regular stream is empty");
    const double active = 100.0 * static_cast<double>(p.size()) / static_cast<double>(r.size());
    return {100.0 - active, active};
}

Index EvalReport::failed_events() const
{
    return std::count_if(per_event.begin(), per_event.end(), [](const EventMetrics& e) { return e.error.has_value(); });
}

std::pair<Index, Index> event_window(const Trace& x, double fraction)
{
    validate(x);
    const Eigen::VectorXd mag = x.samples.cwiseAbs();
    const double level = fraction * mag.maxCoeff();
    Index first = 0;
    while (mag[first] < level)
        ++first;
    Index last = x.size() - 1;
    while (mag[last] < level)
        --last;
    return {first, last};
}

EventMetrics evaluate_event(const Trace& orig, const SampleStream& p, const SampleStream& r, const Band& band)
{
    EventMetrics m;
    const Trace recon = reconstruct(p, grid_of(orig));
    m.nmse_time = nmse_time(orig, recon);
    m.nmse_freq = nmse_freq(orig, recon, band);
    m.n_samples_p = p.size();
    m.n_samples_r = r.size();
    const Savings s = savings(p, r);
    m.savings_pct = s.savings_pct;
    m.active_time_pct = s.active_time_pct;

    const auto [first, last] = event_window(orig);
    auto count_in = [&](const SampleStream& st) {
        const Eigen::VectorXd u = grid_positions(st, grid_of(orig));
        return (u.array() >= static_cast<double>(first) && u.array() <= static_cast<double>(last)).count();
    };
    const auto r_in = count_in(r);
    m.window_savings_pct = r_in > 0 ? 100.0 * (1.0 - static_cast<double>(count_in(p)) / static_cast<double>(r_in)) : 0.0;
    return m;
}

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EvalReport aggregate(std::vector<EventMetrics> events)
{
    EvalReport rep;
    std::vector<double> nt, nf, sv, at, ws, lat;
    for (const auto& e : events) {
        if (e.error)
            continue;
        nt.push_back(e.nmse_time);
        nf.push_back(e.nmse_freq);
        sv.push_back(e.savings_pct);
        at.push_back(e.active_time_pct);
        ws.push_back(e.window_savings_pct);
        if (e.latency_s)
            lat.push_back(*e.latency_s);
        rep.n_samples_p += e.n_samples_p;
        rep.n_samples_r += e.n_samples_r;
    }
    auto summarize = [](const std::vector<double>& v) {
        MetricSummary s;
        if (v.empty())
            return s;
        double acc = 0.0;
        for (double x : v)
            acc += x;
        s.mean = acc / static_cast<double>(v.size());
        s.median = median(v);
        return s;
    };
    rep.nmse_time = summarize(nt);
    rep.nmse_freq = summarize(nf);
    rep.savings_pct = summarize(sv);
    rep.active_time_pct = summarize(at);
    rep.window_savings_pct = summarize(ws);
    rep.latency_s = summarize(lat);
    if (rep.n_samples_r > 0)
        rep.total_savings_pct = 100.0 * (1.0 - static_cast<double>(rep.n_samples_p) / static_cast<double>(rep.n_samples_r));
    rep.per_event = std::move(events);
    return rep;
}

}  // namespace psense
