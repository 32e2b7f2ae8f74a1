#ifndef PSENSE_PBIT_HPP
#define PSENSE_PBIT_HPP

#include "psense/signal.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace psense {

enum class EntropySource { digital_iid, smtj_telegraph };

EntropySource parse_entropy_source(std::string_view name);
std::string_view to_string(EntropySource s);

struct PNeuronConfig {
    double beta = 10.0;    // 1/V
    double v_ref_v = 0.35; // sets the no-event rate X = sigmoid(-beta * v_ref)
    EntropySource source = EntropySource::smtj_telegraph;
    double tau_s = 500e-6; // mean retention time at p = 0.5
    std::uint64_t seed = 1;

    void validate() const;
    /// Activation probability at zero drive.
    double min_rate() const;
};

inline double logistic(double z)
{
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double activation_probability(double v_in_v, const PNeuronConfig& cfg);

/// V_REF giving minimum rate `x` at steepness `beta`.
double v_ref_for_min_rate(double x, double beta);

// ---------------------------------------------------------------------------
// 16-bit Fibonacci LFSR, polynomial x^16 + x^15 + x^13 + x^4 + 1.

struct LfsrState {
    std::uint16_t reg = 0xACE1;
};

LfsrState make_lfsr(std::uint16_t reg);
LfsrState lfsr_from_seed(std::uint64_t seed);

/// One shift. Returns the bit shifted out and the successor state.
std::pair<bool, LfsrState> lfsr_next(LfsrState s);

/// 16 successive output bits, first bit in the LSB. Never zero.
std::uint16_t lfsr_word(LfsrState& s);

/// Bernoulli(p) decision from one 16-bit LFSR word.
bool pbit_decide_iid(double p, LfsrState& rng);

// ---------------------------------------------------------------------------
// Random-telegraph model of the stochastic MTJ.

struct TelegraphState {
    bool state = false;
    double time_in_state_s = 0.0;
    std::mt19937_64 rng;
};

/// State drawn from the stationary distribution for `p`.
TelegraphState make_telegraph(double p, std::uint64_t seed);

/// Mean dwell times (tau_1, tau_0) = (2 tau p, 2 tau (1 - p)) with p clamped
/// to [1e-6, 1 - 1e-6].
std::pair<double, double> dwell_times(double p, double tau_s);

/// First-order step: flips with probability dt / tau_state. Throws when dt
/// exceeds a tenth of the shorter dwell time.
void telegraph_step(TelegraphState& ts, double p, double dt_s, const PNeuronConfig& cfg);

/// Exact transition of the two-state chain over `dt_s` with rates held at
/// `p`; valid for any dt.
void telegraph_advance(TelegraphState& ts, double p, double dt_s, double tau_s);

/// Mean run length of `bits` times `dt_s`; edge runs count as full runs.
double estimate_retention(std::span<const std::uint8_t> bits, double dt_s);

inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace psense

#endif  // PSENSE_PBIT_HPP
