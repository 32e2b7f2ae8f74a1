#include "psense/survey.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

namespace psense {

namespace {

std::string num(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

void ExperimentConfig::validate() const
{
    if (n_events < 1)
        throw Error("n_events must be >= 1");
    if (upsample_factor < 1)
        throw Error("upsample factor must be >= 1");
    if (rate_window_ticks < 1)
        throw Error("rate window must be >= 1 tick");
    if (jobs < 1)
        throw Error("jobs must be >= 1");
    activation.validate();
}

EventRun run_event(const Trace& orig, const ExperimentConfig& cfg, std::uint64_t seed, const std::string& name)
{
    EventRun run;
    run.orig = orig;
    run.metrics.name = name;

    const Trace x_high = upsample(orig, cfg.upsample_factor);
    ActivationConfig act = cfg.activation;
    act.pneuron.seed = seed;
    run.activation = run_activation(x_high, act);
    run.p_adc = sample(x_high, run.activation, AdcKind::p_adc, cfg.quantizer);
    run.r_adc = sample(x_high, run.activation, AdcKind::r_adc, cfg.quantizer);
    run.recon = reconstruct(run.p_adc, grid_of(orig));
    run.metrics = evaluate_event(orig, run.p_adc, run.r_adc, cfg.band);
    run.metrics.name = name;

    const Index onset = event_window(orig, 0.02).first * cfg.upsample_factor;
    try {
        run.metrics.latency_s = detection_latency(run.activation, onset);
    } catch (const Error&) {
        run.metrics.latency_s.reset();
    }
    return run;
}

SurveyDataset load_dataset(const ExperimentConfig& cfg)
{
    if (cfg.dataset)
        return load_survey(*cfg.dataset, cfg.dataset_rate_hz);
    SurveySpec spec = cfg.synth;
    spec.n_events = std::max(spec.n_events, cfg.n_events);
    return synth_survey(spec, cfg.dataset_seed);
}

namespace {

void write_event_files(const EventRun& run, const ExperimentConfig& cfg)
{
    const auto& dir = cfg.output_dir;
    const std::string& name = run.metrics.name;
    write_samples(run.p_adc, dir / (name + "_padc.csv"));
    write_trace(run.recon, dir / (name + "_recon.csv"));

    const Eigen::VectorXd rate = average_rate(run.activation, cfg.rate_window_ticks);
    auto out = open_out(dir / (name + "_rate.csv"));
    out << "window_start_s,rate\n";
    const double window_s = cfg.rate_window_ticks / cfg.activation.sync_rate_hz;
    for (Index w = 0; w < rate.size(); ++w)
        out << num(run.orig.t0_s + static_cast<double>(w) * window_s) << ',' << num(rate[w]) << '\n';
}

}  // namespace

EvalReport run_survey(const ExperimentConfig& cfg)
{
    cfg.validate();
    const SurveyDataset data = load_dataset(cfg);
    const auto n = static_cast<std::size_t>(std::min<std::size_t>(cfg.n_events, data.events.size()));
    std::filesystem::create_directories(cfg.output_dir);

    std::vector<EventMetrics> metrics(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            const std::string& name = data.names[k];
            try {
                const EventRun run = run_event(data.events[k], cfg, cfg.seed + k, name);
                if (cfg.write_event_files)
                    write_event_files(run, cfg);
                metrics[k] = run.metrics;
            } catch (const std::exception& e) {
                metrics[k] = EventMetrics{};
                metrics[k].name = name;
                metrics[k].error = e.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const int extra = std::min<int>(cfg.jobs, static_cast<int>(n)) - 1;
        for (int j = 0; j < extra; ++j)
            pool.emplace_back(worker);
        worker();
    }

    EvalReport rep = aggregate(std::move(metrics));
    auto out = open_out(cfg.output_dir / "report.json");
    out << report_json(rep, cfg);
    return rep;
}

std::vector<CurvePoint> sweep_vin(const ExperimentConfig& cfg, const std::vector<double>& v_grid, int ticks_per_point)
{
    cfg.validate();
    if (v_grid.empty())
        throw Error("empty V_IN grid");
    if (ticks_per_point < 1000)
        throw Error("sweep needs at least 1000 ticks per point");

    const double rate = cfg.activation.sync_rate_hz * cfg.upsample_factor;
    const Index steps = static_cast<Index>(ticks_per_point) * cfg.upsample_factor;
    std::vector<CurvePoint> curve;
    for (std::size_t k = 0; k < v_grid.size(); ++k) {
        const double v = v_grid[k];
        if (!std::isfinite(v))
            throw Error("non-finite V_IN grid value");
        ActivationConfig act = cfg.activation;
        act.pneuron.seed = cfg.seed + k;
        const ActivationTrace a =
            run_activation_driven(Eigen::VectorXd::Constant(steps, v), Eigen::VectorXd::Zero(steps), rate, act);
        curve.push_back({v, static_cast<double>(a.gated_ticks()) / static_cast<double>(a.sync_ticks.size()),
                         activation_probability(v, act.pneuron)});
    }
    return curve;
}

std::vector<CurvePoint> sweep_slope(const ExperimentConfig& cfg, const std::vector<double>& slope_grid,
                                    int ticks_per_point)
{
    cfg.validate();
    if (slope_grid.empty())
        throw Error("empty slope grid");
    if (ticks_per_point < 1000)
        throw Error("sweep needs at least 1000 ticks per point");

    const double rate = cfg.activation.sync_rate_hz * cfg.upsample_factor;
    const Index steps = static_cast<Index>(ticks_per_point) * cfg.upsample_factor;
    std::vector<CurvePoint> curve;
    for (std::size_t k = 0; k < slope_grid.size(); ++k) {
        const double s = slope_grid[k];
        if (!std::isfinite(s) || s < 0.0)
            throw Error("slope grid values must be finite and non-negative");
        ActivationConfig act = cfg.activation;
        act.pneuron.seed = cfg.seed + k;
        act.afe.amp_threshold_v = std::numeric_limits<double>::infinity();

        Trace ramp;
        ramp.rate_hz = rate;
        ramp.samples = Eigen::VectorXd::LinSpaced(steps, 0.0, static_cast<double>(steps - 1)) * (s / rate);
        const ActivationTrace a = run_activation(ramp, act);
        curve.push_back({s, static_cast<double>(a.gated_ticks()) / static_cast<double>(a.sync_ticks.size()),
                         activation_probability(act.afe.slope_gain * s, act.pneuron)});
    }
    return curve;
}

void write_curve(const std::vector<CurvePoint>& curve, const std::string& x_name, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << x_name << ",rate,model\n";
    for (const auto& p : curve)
        out << num(p.x) << ',' << num(p.rate) << ',' << num(p.model) << '\n';
}

void write_samples(const SampleStream& s, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "time_s,value\n";
    for (Index k = 0; k < s.size(); ++k)
        out << num(s.t_s[k]) << ',' << num(s.values[k]) << '\n';
}

std::string report_json(const EvalReport& rep, const ExperimentConfig& cfg)
{
    using nlohmann::ordered_json;
    auto summary = [](const MetricSummary& m) { return ordered_json{{"mean", m.mean}, {"median", m.median}}; };

    const auto& pn = cfg.activation.pneuron;
    ordered_json config{
        {"dataset", cfg.dataset ? cfg.dataset->generic_string() : std::string("synthetic")},
        {"n_events", cfg.n_events},
        {"seed", cfg.seed},
        {"source", std::string(to_string(pn.source))},
        {"beta", pn.beta},
        {"v_ref_v", pn.v_ref_v},
        {"min_rate_x", pn.min_rate()},
        {"tau_s", pn.tau_s},
        {"sync_hz", cfg.activation.sync_rate_hz},
        {"upsample", cfg.upsample_factor},
        {"slope_gain", cfg.activation.afe.slope_gain},
        {"amp_threshold_v", cfg.activation.afe.amp_threshold_v},
        {"smoothing_steps", cfg.activation.afe.smoothing_steps},
        {"delay_steps", cfg.activation.afe.delay_steps},
        {"band_hz", {cfg.band.low_hz, cfg.band.high_hz}},
    };
    if (!cfg.dataset) {
        config["dataset_seed"] = cfg.dataset_seed;
        config["snr_db"] = cfg.synth.snr_db;
    }
    if (cfg.quantizer)
        config["quantizer"] = {{"bits", cfg.quantizer->bits}, {"full_scale_v", cfg.quantizer->full_scale_v}};

    ordered_json aggregate{
        {"events_ok", static_cast<Index>(rep.per_event.size()) - rep.failed_events()},
        {"events_failed", rep.failed_events()},
        {"nmse_time", summary(rep.nmse_time)},
        {"nmse_freq", summary(rep.nmse_freq)},
        {"savings_pct", summary(rep.savings_pct)},
        {"active_time_pct", summary(rep.active_time_pct)},
        {"window_savings_pct", summary(rep.window_savings_pct)},
        {"latency_s", summary(rep.latency_s)},
        {"n_samples_p", rep.n_samples_p},
        {"n_samples_r", rep.n_samples_r},
        {"total_savings_pct", rep.total_savings_pct},
    };

    ordered_json events = ordered_json::array();
    for (const auto& e : rep.per_event) {
        ordered_json j{{"name", e.name}};
        if (e.error) {
            j["error"] = *e.error;
        } else {
            j["nmse_time"] = e.nmse_time;
            j["nmse_freq"] = e.nmse_freq;
            j["n_samples_p"] = e.n_samples_p;
            j["n_samples_r"] = e.n_samples_r;
            j["savings_pct"] = e.savings_pct;
            j["active_time_pct"] = e.active_time_pct;
            j["window_savings_pct"] = e.window_savings_pct;
            j["latency_s"] = e.latency_s ? ordered_json(*e.latency_s) : ordered_json(nullptr);
        }
        events.push_back(std::move(j));
    }

    ordered_json report{{"config", config}, {"aggregate", aggregate}, {"per_event", events}};
    return report.dump(2) + "\n";
}

}  // namespace psense
