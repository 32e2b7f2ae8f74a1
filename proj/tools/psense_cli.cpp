// psense: probabilistic-sampling survey runner.
//
//   psense synth       --out data/          write the synthetic survey as CSV
//   psense run         --dataset data/ --out results/
//   psense sweep-vin   --out results/       gated rate vs. p-neuron input
//   psense sweep-slope --out results/       gated rate vs. signal slope
//
// Every flag can also be given as `key = value` in the file passed to
// --config; flags on the command line win.

#include "psense/survey.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

psense::Band parse_band(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw psense::Error("band must be given as low:high, e.g. 0:200");
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::vector<double> linear_grid(double lo, double hi, int points)
{
    if (points < 2)
        throw psense::Error("grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    return g;
}

void print_report(const psense::EvalReport& rep)
{
    std::printf("events: %ld ok, %ld failed\n", static_cast<long>(rep.per_event.size() - rep.failed_events()),
                static_cast<long>(rep.failed_events()));
    std::printf("nmse_time   mean %.4f %%  median %.4f %%\n", 100 * rep.nmse_time.mean, 100 * rep.nmse_time.median);
    std::printf("nmse_freq   mean %.4f %%  median %.4f %%\n", 100 * rep.nmse_freq.mean, 100 * rep.nmse_freq.median);
    std::printf("savings     mean %.2f %%  (total %.2f %%, event window %.2f %%)\n", rep.savings_pct.mean,
                rep.total_savings_pct, rep.window_savings_pct.mean);
    std::printf("samples     P-ADC %ld / R-ADC %ld\n", static_cast<long>(rep.n_samples_p),
                static_cast<long>(rep.n_samples_r));
    std::printf("latency     mean %.1f us\n", 1e6 * rep.latency_s.mean);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Probabilistic event-based sampling simulator and evaluation harness"};
    app.set_config("--config", "", "Flat key = value config file mirroring the flags");
    app.require_subcommand(1);

    psense::ExperimentConfig cfg;
    std::string dataset;
    std::optional<double> rate;
    double tau_us = cfg.activation.pneuron.tau_s * 1e6;
    std::string source = "smtj";
    std::string band = "0:200";
    std::string out = "out";
    std::optional<int> hold_steps;
    std::optional<int> quantize_bits;
    double full_scale = 10.0;

    auto& pn = cfg.activation.pneuron;
    auto& afe = cfg.activation.afe;
    app.add_option("--dataset", dataset, "Directory of CSV traces (one event per file); synthetic survey if omitted");
    app.add_option("--rate", rate, "Sample rate in Hz for value-only CSV files");
    app.add_option("--n-events", cfg.n_events, "Number of events to evaluate")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Base seed; event k uses seed + k")->capture_default_str();
    app.add_option("--dataset-seed", cfg.dataset_seed, "Seed of the synthetic survey")->capture_default_str();
    app.add_option("--snr-db", cfg.synth.snr_db, "Synthetic survey SNR (signal/noise energy)")->capture_default_str();
    app.add_option("--tau-us", tau_us, "sMTJ retention time in microseconds")->capture_default_str();
    app.add_option("--vref", pn.v_ref_v, "p-neuron reference voltage")->capture_default_str();
    app.add_option("--beta", pn.beta, "p-neuron steepness in 1/V")->capture_default_str();
    app.add_option("--source", source, "Entropy source")->check(CLI::IsMember({"digital", "smtj"}))->capture_default_str();
    app.add_option("--sync-hz", cfg.activation.sync_rate_hz, "V_Sync frequency")->capture_default_str();
    app.add_option("--upsample", cfg.upsample_factor, "Fine-grid factor over the data rate")->capture_default_str();
    app.add_option("--band", band, "Frequency band low:high in Hz for spectral NMSE")->capture_default_str();
    app.add_option("--slope-gain", afe.slope_gain, "Drive volts per V/s of slope")->capture_default_str();
    app.add_option("--amp-threshold", afe.amp_threshold_v, "Deterministic activation threshold in volts")
        ->capture_default_str();
    app.add_option("--smoothing", afe.smoothing_steps, "Slope moving-average window in fine steps")
        ->capture_default_str();
    app.add_option("--delay-steps", afe.delay_steps, "AFE response delay in fine steps")->capture_default_str();
    app.add_option("--hold-steps", hold_steps, "Deterministic activation hold in fine steps (default: one sync period)");
    app.add_option("--quantize-bits", quantize_bits, "Enable a uniform ADC quantizer with this many bits");
    app.add_option("--full-scale", full_scale, "Quantizer full scale in volts")->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "Worker threads for the survey")->capture_default_str();
    app.add_option("--out", out, "Output directory")->capture_default_str();

    auto* run = app.add_subcommand("run", "Run the P-ADC / R-ADC survey comparison")->fallthrough();
    auto* synth = app.add_subcommand("synth", "Write the synthetic survey as CSV files")->fallthrough();

    double v_min = -0.5, v_max = 1.2, slope_max = 400.0;
    int points = 18, ticks = 10000;
    auto* sweep_vin = app.add_subcommand("sweep-vin", "Sweep constant p-neuron input")->fallthrough();
    sweep_vin->add_option("--v-min", v_min)->capture_default_str();
    sweep_vin->add_option("--v-max", v_max)->capture_default_str();
    auto* sweep_slope = app.add_subcommand("sweep-slope", "Sweep input slope through the AFE")->fallthrough();
    sweep_slope->add_option("--slope-max", slope_max, "Largest slope in V/s")->capture_default_str();
    for (auto* sub : {sweep_vin, sweep_slope}) {
        sub->add_option("--points", points)->capture_default_str();
        sub->add_option("--ticks", ticks, "Sync ticks per grid point")->capture_default_str();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!dataset.empty())
            cfg.dataset = dataset;
        cfg.dataset_rate_hz = rate;
        pn.tau_s = tau_us * 1e-6;
        pn.source = psense::parse_entropy_source(source);
        cfg.band = parse_band(band);
        cfg.activation.hold_steps = hold_steps;
        if (quantize_bits)
            cfg.quantizer = psense::Quantizer{*quantize_bits, full_scale};
        cfg.output_dir = out;
        cfg.validate();

        if (*synth) {
            psense::SurveySpec spec = cfg.synth;
            spec.n_events = cfg.n_events;
            const auto survey = psense::synth_survey(spec, cfg.dataset_seed);
            psense::write_survey(survey, cfg.output_dir);
            std::printf("wrote %zu events to %s\n", survey.events.size(), cfg.output_dir.string().c_str());
            return 0;
        }
        if (*sweep_vin || *sweep_slope) {
            std::filesystem::create_directories(cfg.output_dir);
            const bool vin = sweep_vin->parsed();
            const auto grid = vin ? linear_grid(v_min, v_max, points) : linear_grid(0.0, slope_max, points);
            const auto curve = vin ? psense::sweep_vin(cfg, grid, ticks) : psense::sweep_slope(cfg, grid, ticks);
            const auto path = cfg.output_dir / (vin ? "sweep_vin.csv" : "sweep_slope.csv");
            psense::write_curve(curve, vin ? "v_in" : "slope", path);
            for (const auto& p : curve)
                std::printf("%12.5g  rate %.4f  model %.4f\n", p.x, p.rate, p.model);
            std::printf("wrote %s\n", path.string().c_str());
            return 0;
        }
        if (*run) {
            const auto rep = psense::run_survey(cfg);
            print_report(rep);
            if (rep.failed_events() > 0) {
                for (const auto& e : rep.per_event) {
                    if (e.error)
                        std::fprintf(stderr, "event %s failed: %s\n", e.name.c_str(), e.error->c_str());
                }
                return 2;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
