#include "psense/acquisition.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace psense;

namespace {

constexpr double kRate = 100000.0;

ActivationConfig config_for_min_rate(double x, std::uint64_t seed = 1)
{
    ActivationConfig cfg;
    cfg.pneuron.v_ref_v = v_ref_for_min_rate(x, cfg.pneuron.beta);
    cfg.pneuron.source = EntropySource::digital_iid;
    cfg.pneuron.seed = seed;
    return cfg;
}

ActivationConfig saturated()
{
    ActivationConfig cfg;
    cfg.pneuron.source = EntropySource::digital_iid;
    cfg.pneuron.v_ref_v = -10.0;
    return cfg;
}

Trace tone(Index n, double rate, double f, double amp = 1.0)
{
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate);
    return make_trace(std::move(x), rate);
}

SampleStream stream(std::initializer_list<double> t, std::initializer_list<double> v)
{
    SampleStream s;
    s.t_s = Eigen::Map<const Eigen::VectorXd>(t.begin(), static_cast<Index>(t.size()));
    s.values = Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Index>(v.size()));
    return s;
}

// O(N^2) DFT magnitude with long double accumulation.
Eigen::VectorXd direct_dft_magnitude(const Eigen::VectorXd& x)
{
    const Index n = x.size();
    Eigen::VectorXd mag(n / 2 + 1);
    for (Index k = 0; k <= n / 2; ++k) {
        long double re = 0.0L;
        long double im = 0.0L;
        for (Index j = 0; j < n; ++j) {
            const long double phase = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * j) % n) /
                                      static_cast<long double>(n);
            re += x[j] * std::cos(phase);
            im += x[j] * std::sin(phase);
        }
        mag[k] = static_cast<double>(std::sqrt(re * re + im * im));
    }
    return mag;
}

}  // namespace

TEST_CASE("saturated activation makes the P-ADC stream equal the R-ADC stream")
{
    const Trace x = upsample(tone(200, 2000.0, 37.0), 50);
    const ActivationTrace a = run_activation(x, saturated());
    const SampleStream p = sample(x, a, AdcKind::p_adc);
    const SampleStream r = sample(x, a, AdcKind::r_adc);
    CHECK(p.size() == 200);
    CHECK(p == r);
    CHECK(r.source == AdcKind::r_adc);
    // R-ADC values are the original 2 kHz samples
    const Trace orig = tone(200, 2000.0, 37.0);
    CHECK((r.values.array() == orig.samples.array()).all());
    for (Index k = 0; k < r.size(); ++k)
        CHECK(r.t_s[k] == doctest::Approx(orig.time_at(k)).epsilon(1e-15));
}

TEST_CASE("no-gate activation yields an empty stream; X = 0.05 yields a binomial count")
{
    const Trace flat = make_trace(Eigen::VectorXd::Zero(10000 * 50), kRate);
    const ActivationTrace none = run_activation(flat, config_for_min_rate(1e-12));
    CHECK(sample(flat, none).size() == 0);

    const ActivationTrace a = run_activation(flat, config_for_min_rate(0.05, 31));
    const double n = static_cast<double>(sample(flat, a).size());
    const double sigma = std::sqrt(10000 * 0.05 * 0.95);
    CHECK(std::abs(n - 500.0) <= 3.0 * sigma);

    // P-ADC times are a subset of R-ADC times
    const SampleStream p = sample(flat, a);
    const SampleStream r = sample(flat, a, AdcKind::r_adc);
    Index j = 0;
    for (Index k = 0; k < p.size(); ++k) {
        while (j < r.size() && r.t_s[j] != p.t_s[k])
            ++j;
        CHECK(j < r.size());
    }
}

TEST_CASE("sample rejects a mismatched grid")
{
    const Trace x = make_trace(Eigen::VectorXd::Zero(1000), kRate);
    const ActivationTrace a = run_activation(x, config_for_min_rate(0.05));
    CHECK_THROWS_AS(sample(make_trace(Eigen::VectorXd::Zero(999), kRate), a), Error);
    CHECK_THROWS_AS(sample(make_trace(Eigen::VectorXd::Zero(1000), 2 * kRate), a), Error);
}

TEST_CASE("reconstruct: midpoint, nodes and constant edges")
{
    const Trace mid = reconstruct(stream({0.0, 1.0}, {0.0, 1.0}), GridSpec{2.0, 3, 0.0});
    CHECK(mid.samples[0] == 0.0);
    CHECK(mid.samples[1] == 0.5);
    CHECK(mid.samples[2] == 1.0);

    // samples at t = 2 and 5 on a 1 Hz grid of 8 points
    const Trace r = reconstruct(stream({2.0, 5.0}, {3.0, 6.0}), GridSpec{1.0, 8, 0.0});
    Eigen::VectorXd expected(8);
    expected << 3, 3, 3, 4, 5, 6, 6, 6;
    CHECK(r.samples.isApprox(expected, 1e-15));

    CHECK_THROWS_AS(reconstruct(stream({1.0}, {1.0}), GridSpec{1.0, 4, 0.0}), Error);
    CHECK_THROWS_AS(reconstruct(SampleStream{}, GridSpec{1.0, 4, 0.0}), Error);
    CHECK_THROWS_AS(reconstruct(stream({2.0, 1.0}, {0.0, 0.0}), GridSpec{1.0, 4, 0.0}), Error);
}

TEST_CASE("reconstruct passes exactly through every sample of a random subset")
{
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    std::bernoulli_distribution keep(0.2);
    const double rate = 2000.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 500;
        std::vector<double> t;
        std::vector<double> v;
        std::vector<Index> idx;
        for (Index i = 0; i < n; ++i) {
            if (keep(rng) || i == 0 || i == n - 1) {
                t.push_back(0.5 + static_cast<double>(i) / rate);
                v.push_back(g(rng));
                idx.push_back(i);
            }
        }
        SampleStream s;
        s.t_s = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Index>(t.size()));
        s.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
        const Trace r = reconstruct(s, GridSpec{rate, n, 0.5});
        for (std::size_t k = 0; k < idx.size(); ++k)
            CHECK(r.samples[idx[k]] == v[k]);
        // between nodes the reconstruction stays inside the neighbour envelope
        for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
            for (Index i = idx[k]; i <= idx[k + 1]; ++i) {
                CHECK(r.samples[i] >= std::min(v[k], v[k + 1]) - 1e-15);
                CHECK(r.samples[i] <= std::max(v[k], v[k + 1]) + 1e-15);
            }
        }
    }
}

TEST_CASE("nmse_time reference cases")
{
    const Trace x = tone(1000, 2000.0, 13.0);
    CHECK(nmse_time(x, x) == 0.0);
    Trace zero = x;
    zero.samples.setZero();
    CHECK(nmse_time(x, zero) == 1.0);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.1);
    Trace noisy = x;
    for (auto& v : noisy.samples)
        v += g(rng);
    const double base = nmse_time(x, noisy);
    Trace xs = x;
    Trace ns = noisy;
    xs.samples *= 8.0;
    ns.samples *= 8.0;
    CHECK(nmse_time(xs, ns) == base);
    xs.samples = x.samples * 3.3;
    ns.samples = noisy.samples * 3.3;
    CHECK(nmse_time(xs, ns) == doctest::Approx(base).epsilon(1e-12));

    CHECK_THROWS_AS(nmse_time(zero, x), Error);
    CHECK_THROWS_AS(nmse_time(x, tone(999, 2000.0, 13.0)), Error);
}

TEST_CASE("magnitude_spectrum matches a direct DFT")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Index n : {16, 17, 100, 250, 2000}) {
        Eigen::VectorXd x(n);
        for (auto& v : x)
            v = g(rng);
        const Eigen::VectorXd fast = magnitude_spectrum(x);
        const Eigen::VectorXd slow = direct_dft_magnitude(x);
        REQUIRE(fast.size() == n / 2 + 1);
        CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-9 * slow.maxCoeff());
    }
    // Parseval for even N: sum x^2 = (|X0|^2 + 2 sum |Xk|^2 + |X_{N/2}|^2) / N
    Eigen::VectorXd x(64);
    for (auto& v : x)
        v = g(rng);
    const Eigen::VectorXd m = magnitude_spectrum(x);
    const double parseval =
        (m[0] * m[0] + 2.0 * m.segment(1, 31).squaredNorm() + m[32] * m[32]) / 64.0;
    CHECK(parseval == doctest::Approx(x.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("nmse_freq restricts the comparison to the band")
{
    const Trace x = tone(2000, 2000.0, 30.0);
    const Band band{0.0, 200.0};
    CHECK(nmse_freq(x, x, band) == 0.0);

    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 0.05);
    Trace recon = x;
    for (auto& v : recon.samples)
        v += g(rng);
    const double base = nmse_freq(x, recon, band);
    CHECK(base > 0.0);

    // An exact-bin 900 Hz tone has no energy in 0..200 Hz.
    Trace with_tone = recon;
    with_tone.samples += tone(2000, 2000.0, 900.0, 0.5).samples;
    CHECK(std::abs(nmse_freq(x, with_tone, band) - base) < 1e-12);
    CHECK(nmse_freq(x, with_tone, Band{0.0, 1000.0}) > base);

    CHECK_THROWS_AS(nmse_freq(x, x, Band{10.2, 10.8}), Error);    // no bin (df = 1 Hz)
    CHECK_THROWS_AS(nmse_freq(x, x, Band{0.0, 1500.0}), Error);   // above Nyquist
    CHECK_THROWS_AS(nmse_freq(x, x, Band{100.0, 50.0}), Error);
    Trace silent = x;
    silent.samples.setZero();
    CHECK_THROWS_AS(nmse_freq(silent, x, band), Error);
    CHECK_NOTHROW(nmse_freq(x, x, Band{30.0, 30.0}));
}

TEST_CASE("savings and active time")
{
    const SampleStream r = stream({0, 1, 2, 3}, {0, 0, 0, 0});
    CHECK(savings(r, r).savings_pct == 0.0);
    CHECK(savings(r, r).active_time_pct == 100.0);
    CHECK(savings(SampleStream{}, r).savings_pct == 100.0);
    const Savings quarter = savings(stream({1}, {0}), r);
    CHECK(quarter.savings_pct == 75.0);
    CHECK(quarter.active_time_pct == 25.0);
    CHECK_THROWS_AS(savings(r, SampleStream{}), Error);

    for (Index p = 0; p <= 4000; p += 37) {
        SampleStream ps;
        ps.t_s.resize(p);
        SampleStream rs;
        rs.t_s.resize(4001);
        const Savings s = savings(ps, rs);
        CHECK(s.savings_pct + s.active_time_pct == 100.0);
    }
}

TEST_CASE("quantizer is mid-tread and clamps at full scale")
{
    const Quantizer q{3, 3.0};  // levels -3..3, lsb 1
    CHECK(q(0.0) == 0.0);
    CHECK(q(0.49) == 0.0);
    CHECK(q(1.6) == 2.0);
    CHECK(q(-2.4) == -2.0);
    CHECK(q(7.0) == 3.0);
    CHECK(q(-7.0) == -3.0);

    const Quantizer fine;
    const double lsb = fine.full_scale_v / (std::ldexp(1.0, fine.bits - 1) - 1.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(std::abs(fine(v) - v) <= 0.5 * lsb * (1 + 1e-9));
    }
    CHECK_THROWS_AS((Quantizer{1, 1.0})(0.0), Error);
    CHECK_THROWS_AS((Quantizer{8, 0.0})(0.0), Error);

    const Trace x = upsample(tone(100, 2000.0, 37.0), 50);
    const ActivationTrace a = run_activation(x, saturated());
    const SampleStream s = sample(x, a, AdcKind::r_adc, q);
    for (Index k = 0; k < s.size(); ++k)
        CHECK(s.values[k] == std::round(s.values[k]));
}

TEST_CASE("event_window brackets the samples above the level")
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(10);
    v[3] = 0.5;
    v[4] = -2.0;
    v[7] = 0.2;
    const Trace x = make_trace(v, 1.0);
    CHECK(event_window(x) == std::pair<Index, Index>{3, 7});
    CHECK(event_window(x, 0.25) == std::pair<Index, Index>{3, 4});
    CHECK(event_window(x, 1.0) == std::pair<Index, Index>{4, 4});
}

TEST_CASE("evaluate_event with identical streams is exact")
{
    const Trace orig = tone(400, 2000.0, 25.0);
    const Trace x = upsample(orig, 50);
    const ActivationTrace a = run_activation(x, saturated());
    const SampleStream r = sample(x, a, AdcKind::r_adc);
    const EventMetrics m = evaluate_event(orig, sample(x, a), r, Band{});
    CHECK(m.nmse_time == 0.0);
    CHECK(m.nmse_freq == 0.0);
    CHECK(m.savings_pct == 0.0);
    CHECK(m.window_savings_pct == 0.0);
    CHECK(m.n_samples_p == 400);
}

TEST_CASE("aggregate uses mean and median over completed events")
{
    CHECK(median({}) == 0.0);
    CHECK(median({3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 10.0}) == 3.0);

    std::vector<EventMetrics> ev(3);
    ev[0].nmse_time = 0.01;
    ev[0].savings_pct = 90.0;
    ev[0].n_samples_p = 10;
    ev[0].n_samples_r = 100;
    ev[0].latency_s = 1e-3;
    ev[1].nmse_time = 0.03;
    ev[1].savings_pct = 80.0;
    ev[1].n_samples_p = 30;
    ev[1].n_samples_r = 100;
    ev[2].error = "boom";
    ev[2].nmse_time = 99.0;
    const EvalReport rep = aggregate(ev);
    CHECK(rep.nmse_time.mean == doctest::Approx(0.02));
    CHECK(rep.nmse_time.median == doctest::Approx(0.02));
    CHECK(rep.savings_pct.mean == doctest::Approx(85.0));
    CHECK(rep.total_savings_pct == doctest::Approx(80.0));
    CHECK(rep.latency_s.mean == doctest::Approx(1e-3));
    CHECK(rep.failed_events() == 1);
    CHECK(rep.per_event.size() == 3);
}
