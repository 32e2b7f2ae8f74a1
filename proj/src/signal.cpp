#include "psense/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace psense {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& field, std::size_t row)
{
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (!field.empty() && *begin == '+')
        ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc::result_out_of_range)
        throw Error("non-finite value at row " + std::to_string(row));
    if (ec != std::errc() || ptr != end)
        throw Error("malformed number '" + field + "' at row " + std::to_string(row));
    if (!std::isfinite(v))
        throw Error("non-finite value at row " + std::to_string(row));
    return v;
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Rate recovered from printed timestamps. Prefers a candidate that
// reproduces every timestamp as `t0 + i / rate` exactly (true for files from
// `write_trace`), trying the 12-significant-digit rounding first.
double recover_rate(const std::vector<double>& times)
{
    const double estimate =
        static_cast<double>(times.size() - 1) / (times.back() - times.front());
    const double mag = std::pow(10.0, std::floor(std::log10(estimate)) - 11.0);
    const double snapped = std::round(estimate / mag) * mag;

    auto reproduces = [&](double rate) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times.front() + static_cast<double>(i) / rate != times[i])
                return false;
        }
        return true;
    };
    std::vector<double> candidates{snapped, estimate};
    double up = estimate;
    double down = estimate;
    for (int k = 0; k < 16; ++k) {
        up = std::nextafter(up, INFINITY);
        down = std::nextafter(down, 0.0);
        candidates.push_back(up);
        candidates.push_back(down);
    }
    for (double c : candidates) {
        if (reproduces(c))
            return c;
    }
    return std::abs(snapped - estimate) <= 1e-9 * estimate ? snapped : estimate;
}

}  // namespace

Trace load_trace(const std::filesystem::path& path, TraceFormat format, std::optional<double> rate_hz)
{
    if (format != TraceFormat::csv)
        throw Error("unsupported trace format");
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open trace file: " + path.string());

    std::string line;
    std::string header;
    while (std::getline(in, line)) {
        header = trim(line);
        if (!header.empty())
            break;
    }
    if (header.empty())
        throw Error("empty file: " + path.string());
    if (header.size() >= 3 && static_cast<unsigned char>(header[0]) == 0xEF)
        header = header.substr(3);  // UTF-8 BOM

    bool has_time = false;
    if (header == "time_s,value")
        has_time = true;
    else if (header != "value")
        throw Error("unrecognised CSV header '" + header + "' (expected 'time_s,value' or 'value')");

    std::vector<double> times;
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty())
            continue;
        ++row;
        if (has_time) {
            const auto comma = s.find(',');
            if (comma == std::string::npos)
                throw Error("missing value column at row " + std::to_string(row));
            times.push_back(parse_number(trim(s.substr(0, comma)), row));
            values.push_back(parse_number(trim(s.substr(comma + 1)), row));
        } else {
            values.push_back(parse_number(s, row));
        }
    }
    if (values.empty())
        throw Error("empty file: " + path.string());

    Trace t;
    t.samples = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    if (has_time) {
        t.t0_s = times.front();
        if (times.size() >= 2) {
            const double span = times.back() - times.front();
            if (!(span > 0.0))
                throw Error("non-uniform grid: timestamps not increasing");
            const double rate = rate_hz ? *rate_hz : recover_rate(times);
            const double step = 1.0 / rate;
            for (std::size_t i = 1; i < times.size(); ++i) {
                if (std::abs((times[i] - times[i - 1]) - step) > 1e-6 * step)
                    throw Error("non-uniform grid at row " + std::to_string(i + 1));
            }
            t.rate_hz = rate;
        } else if (rate_hz) {
            t.rate_hz = *rate_hz;
        } else {
            throw Error("single-row trace needs an explicit sample rate");
        }
    } else {
        if (!rate_hz)
            throw Error("value-only CSV needs an explicit sample rate");
        t.rate_hz = *rate_hz;
    }
    validate(t);
    return t;
}

void write_trace(const Trace& trace, const std::filesystem::path& path)
{
    validate(trace);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write trace file: " + path.string());
    out << "time_s,value\n";
    for (Index i = 0; i < trace.size(); ++i)
        out << format_number(trace.time_at(i)) << ',' << format_number(trace.samples[i]) << '\n';
    if (!out)
        throw Error("write failed: " + path.string());
}

double ricker(double t, double f0_hz)
{
    const double a = std::numbers::pi * f0_hz * t;
    const double u = a * a;
    return (1.0 - 2.0 * u) * std::exp(-u);
}

Trace synth_event(const RickerEvent& ev, std::uint64_t seed)
{
    if (!(ev.duration_s > 0.0) || !(ev.rate_hz > 0.0))
        throw Error("duration and rate must be positive");
    if (!(ev.onset_s > 0.0 && ev.onset_s < ev.duration_s))
        throw Error("onset must lie strictly inside the trace");
    if (!(ev.wavelet_f0_hz > 0.0 && ev.wavelet_f0_hz < ev.rate_hz / 2.0))
        throw Error("wavelet peak frequency must be in (0, rate/2)");
    if (!(ev.amplitude > 0.0))
        throw Error("amplitude must be positive");
    if (!(ev.noise_rms >= 0.0) || !std::isfinite(ev.noise_rms))
        throw Error("noise_rms must be >= 0");

    const auto n = static_cast<Index>(std::llround(ev.duration_s * ev.rate_hz));
    if (n < 2)
        throw Error("trace must span at least two samples");

    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i)
        x[i] = ricker(static_cast<double>(i) / ev.rate_hz - ev.onset_s, ev.wavelet_f0_hz);
    x *= ev.amplitude / x.cwiseAbs().maxCoeff();

    if (ev.noise_rms > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, ev.noise_rms);
        for (Index i = 0; i < n; ++i)
            x[i] += noise(rng);
    }
    return make_trace(std::move(x), ev.rate_hz);
}

SurveyDataset synth_survey(const SurveySpec& spec, std::uint64_t seed)
{
    if (spec.n_events < 1)
        throw Error("survey needs at least one event");
    SurveyDataset survey;
    survey.label = "synthetic-ricker";
    for (int k = 0; k < spec.n_events; ++k) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
        std::uniform_real_distribution<double> f0(spec.f0_min_hz, spec.f0_max_hz);
        std::uniform_real_distribution<double> onset(spec.onset_min_s, spec.onset_max_s);

        RickerEvent ev;
        ev.duration_s = spec.duration_s;
        ev.rate_hz = spec.rate_hz;
        ev.wavelet_f0_hz = f0(rng);
        ev.onset_s = onset(rng);
        ev.amplitude = spec.amplitude;

        const Trace clean = synth_event(ev, 0);
        const double signal_power = clean.samples.squaredNorm() / static_cast<double>(clean.size());
        ev.noise_rms = std::sqrt(signal_power / std::pow(10.0, spec.snr_db / 10.0));

        char name[32];
        std::snprintf(name, sizeof name, "event_%03d", k);
        survey.events.push_back(synth_event(ev, rng()));
        survey.names.emplace_back(name);
    }
    return survey;
}

SurveyDataset load_survey(const std::filesystem::path& dir, std::optional<double> rate_hz)
{
    if (!std::filesystem::is_directory(dir))
        throw Error("dataset directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw Error("no .csv traces in " + dir.string());

    SurveyDataset survey;
    survey.label = dir.filename().string();
    for (const auto& f : files) {
        survey.events.push_back(load_trace(f, TraceFormat::csv, rate_hz));
        survey.names.push_back(f.stem().string());
        if (survey.events.back().rate_hz != survey.events.front().rate_hz)
            throw Error("survey events do not share a sample rate: " + f.string());
    }
    return survey;
}

void write_survey(const SurveyDataset& survey, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < survey.events.size(); ++k)
        write_trace(survey.events[k], dir / (survey.names.at(k) + ".csv"));
}

}  // namespace psense
