#ifndef PSENSE_SURVEY_HPP
#define PSENSE_SURVEY_HPP

#include "psense/acquisition.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace psense {

struct ExperimentConfig {
    std::optional<std::filesystem::path> dataset;  // directory of CSV traces; synthetic survey when empty
    std::optional<double> dataset_rate_hz;        // for value-only CSV files
    SurveySpec synth;
    std::uint64_t dataset_seed = 1000;  // synthetic survey only
    int n_events = 50;
    ActivationConfig activation;
    int upsample_factor = 50;
    Band band;
    std::uint64_t seed = 1;  // event k uses seed + k
    std::optional<Quantizer> quantizer;
    int rate_window_ticks = 20;
    int jobs = 1;
    std::filesystem::path output_dir = "out";
    bool write_event_files = true;

    void validate() const;
};

/// Everything one event produced, kept for callers that want more than the
/// metrics.
struct EventRun {
    Trace orig;
    ActivationTrace activation;
    SampleStream p_adc;
    SampleStream r_adc;
    Trace recon;
    EventMetrics metrics;
};

/// Full per-event pipeline: upsample, activation, P-ADC and R-ADC sampling,
/// reconstruction and metrics.
EventRun run_event(const Trace& orig, const ExperimentConfig& cfg, std::uint64_t seed, const std::string& name = {});

SurveyDataset load_dataset(const ExperimentConfig& cfg);

/// Runs the first `n_events` of the dataset and writes `report.json` plus
/// per-event CSV files to `output_dir`. Per-event failures are recorded in
/// the report and do not stop the run.
EvalReport run_survey(const ExperimentConfig& cfg);

struct CurvePoint {
    double x = 0.0;
    double rate = 0.0;
    double model = 0.0;  // closed-form activation probability
};

/// Gated fraction for each constant p-neuron drive in `v_grid` on a zero signal.
std::vector<CurvePoint> sweep_vin(const ExperimentConfig& cfg, const std::vector<double>& v_grid, int ticks_per_point);

/// Gated fraction for ramps of each slope in `slope_grid` through the AFE.
std::vector<CurvePoint> sweep_slope(const ExperimentConfig& cfg, const std::vector<double>& slope_grid,
                                    int ticks_per_point);

void write_curve(const std::vector<CurvePoint>& curve, const std::string& x_name, const std::filesystem::path& path);

std::string report_json(const EvalReport& rep, const ExperimentConfig& cfg);

void write_samples(const SampleStream& s, const std::filesystem::path& path);

}  // namespace psense

#endif  // PSENSE_SURVEY_HPP
