#include "psense/pbit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psense {

namespace {

constexpr double kSaturation = 1e-6;

void check_probability(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error("probability out of [0, 1]: " + std::to_string(p));
}

}  // namespace

EntropySource parse_entropy_source(std::string_view name)
{
    if (name == "digital" || name == "digital_iid")
        return EntropySource::digital_iid;
    if (name == "smtj" || name == "smtj_telegraph")
        return EntropySource::smtj_telegraph;
    throw Error("unknown entropy source: " + std::string(name));
}

std::string_view to_string(EntropySource s)
{
    return s == EntropySource::digital_iid ? "digital" : "smtj";
}

void PNeuronConfig::validate() const
{
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw Error("beta must be positive");
    if (!(tau_s > 0.0) || !std::isfinite(tau_s))
        throw Error("tau_s must be positive");
    if (!std::isfinite(v_ref_v))
        throw Error("v_ref must be finite");
    const double x = min_rate();
    // X = 1 is allowed: a saturated p-neuron gates every tick.
    if (!(x > 0.0 && x <= 1.0))
        throw Error("minimum rate sigmoid(-beta * v_ref) must lie in (0, 1]");
}

double PNeuronConfig::min_rate() const
{
    return logistic(-beta * v_ref_v);
}

double activation_probability(double v_in_v, const PNeuronConfig& cfg)
{
    return logistic(cfg.beta * (v_in_v - cfg.v_ref_v));
}

double v_ref_for_min_rate(double x, double beta)
{
    if (!(x > 0.0 && x < 1.0) || !(beta > 0.0))
        throw Error("minimum rate must be in (0, 1) and beta positive");
    return std::log((1.0 - x) / x) / beta;
}

LfsrState make_lfsr(std::uint16_t reg)
{
    if (reg == 0)
        throw Error("LFSR register must be nonzero");
    return LfsrState{reg};
}

LfsrState lfsr_from_seed(std::uint64_t seed)
{
    return make_lfsr(static_cast<std::uint16_t>(1 + seed % 65535));
}

std::pair<bool, LfsrState> lfsr_next(LfsrState s)
{
    const std::uint16_t r = s.reg;
    // taps 16, 15, 13, 4 -> register bits 0, 1, 3, 12
    const auto feedback = static_cast<std::uint16_t>((r ^ (r >> 1) ^ (r >> 3) ^ (r >> 12)) & 1u);
    const bool out = (r & 1u) != 0;
    return {out, LfsrState{static_cast<std::uint16_t>((r >> 1) | (feedback << 15))}};
}

std::uint16_t lfsr_word(LfsrState& s)
{
    std::uint16_t w = 0;
    for (int k = 0; k < 16; ++k) {
        auto [bit, next] = lfsr_next(s);
        w |= static_cast<std::uint16_t>(bit) << k;
        s = next;
    }
    return w;
}

bool pbit_decide_iid(double p, LfsrState& rng)
{
    check_probability(p);
    return static_cast<double>(lfsr_word(rng)) < p * 65536.0;
}

TelegraphState make_telegraph(double p, std::uint64_t seed)
{
    check_probability(p);
    TelegraphState ts;
    ts.rng.seed(seed);
    ts.state = uniform01(ts.rng) < p;
    return ts;
}

std::pair<double, double> dwell_times(double p, double tau_s)
{
    const double q = std::clamp(p, kSaturation, 1.0 - kSaturation);
    return {2.0 * tau_s * q, 2.0 * tau_s * (1.0 - q)};
}

void telegraph_step(TelegraphState& ts, double p, double dt_s, const PNeuronConfig& cfg)
{
    if (!(p > 0.0 && p < 1.0))
        throw Error("telegraph step needs 0 < p < 1");
    if (!(dt_s > 0.0))
        throw Error("telegraph step needs dt > 0");
    const auto [tau1, tau0] = dwell_times(p, cfg.tau_s);
    if (dt_s > std::min(tau1, tau0) / 10.0)
        throw Error("time step " + std::to_string(dt_s) + " s too coarse for dwell times (" +
                    std::to_string(tau1) + ", " + std::to_string(tau0) + ") s");
    const double flip = dt_s / (ts.state ? tau1 : tau0);
    if (uniform01(ts.rng) < flip) {
        ts.state = !ts.state;
        ts.time_in_state_s = 0.0;
    } else {
        ts.time_in_state_s += dt_s;
    }
}

void telegraph_advance(TelegraphState& ts, double p, double dt_s, double tau_s)
{
    const auto [tau1, tau0] = dwell_times(p, tau_s);
    const double q = tau1 / (tau1 + tau0);
    const double relax = -std::expm1(-dt_s * (1.0 / tau1 + 1.0 / tau0));
    const double flip = ts.state ? (1.0 - q) * relax : q * relax;
    if (uniform01(ts.rng) < flip) {
        ts.state = !ts.state;
        ts.time_in_state_s = 0.0;
    } else {
        ts.time_in_state_s += dt_s;
    }
}

double estimate_retention(std::span<const std::uint8_t> bits, double dt_s)
{
    if (!(dt_s > 0.0))
        throw Error("dt must be positive");
    if (bits.empty())
        throw Error("empty bit sequence");
    std::size_t runs = 1;
    for (std::size_t i = 1; i < bits.size(); ++i)
        runs += (bits[i] != 0) != (bits[i - 1] != 0);
    if (runs < 2)
        throw Error("constant sequence has no transitions");
    return static_cast<double>(bits.size()) / static_cast<double>(runs) * dt_s;
}

}  // namespace psense
