#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "ldacs/channel.hpp"
#include "ldacs/ofdm.hpp"

using namespace ldacs;

namespace {

const PhyParams kParams{};

const PreambleTemplate& tpl() {
    static const PreambleTemplate t = generate_preamble(kParams);
    return t;
}

ComplexVector qpsk_stream(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ComplexVector x(n);
    for (auto& v : x) {
        v = random_qpsk(rng);
    }
    return x;
}

double mean_power(std::span<const Complex> x) {
    double p = 0.0;
    for (const auto& v : x) {
        p += std::norm(v);
    }
    return p / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("scenario names round-trip") {
    for (Scenario s : {Scenario::awgn, Scenario::enr, Scenario::enr_dme, Scenario::tma}) {
        CHECK(parse_scenario(to_string(s)) == s);
    }
    CHECK(to_string(Scenario::enr_dme) == "enr-dme");
    CHECK_THROWS_AS(parse_scenario("rural"), std::invalid_argument);
}

TEST_CASE("config validation") {
    ChannelConfig c = make_scenario(Scenario::awgn, 10.0, 0.0);
    CHECK_NOTHROW(c.validate());
    c.cfo = 2.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = make_scenario(Scenario::enr, 10.0, 0.0);
    c.tap_powers_db.pop_back();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = make_scenario(Scenario::awgn, std::nan(""), 0.0);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("apply_cfo examples") {
    const ComplexVector x = qpsk_stream(512, 1);
    CHECK(apply_cfo(x, 0.0, kParams) == x);

    const ComplexVector ones(512, Complex{1.0, 0.0});
    const ComplexVector y = apply_cfo(ones, 1.0, kParams);
    CHECK(std::abs(y[64] - Complex{0.0, 1.0}) < 1e-15);
    for (std::size_t n = 0; n < y.size(); ++n) {
        CHECK(std::abs(y[n] - std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(n) / 256.0)) < 1e-13);
    }
}

TEST_CASE("apply_cfo is additive in the offset") {
    const ComplexVector x = qpsk_stream(4096, 2);
    const ComplexVector two_step = apply_cfo(apply_cfo(x, 0.37, kParams), -1.21, kParams);
    const ComplexVector one_step = apply_cfo(x, 0.37 - 1.21, kParams);
    for (std::size_t n = 0; n < x.size(); ++n) {
        CHECK(std::abs(two_step[n] - one_step[n]) < 1e-12);
    }
}

TEST_CASE("apply_cfo uses the absolute stream index") {
    const ComplexVector x = qpsk_stream(300, 3);
    const ComplexVector full = apply_cfo(ComplexVector(1000, Complex{1.0, 0.0}), 0.8, kParams);
    const ComplexVector part = apply_cfo(x, 0.8, kParams, 700);
    for (std::size_t n = 0; n < x.size(); ++n) {
        CHECK(std::abs(part[n] - x[n] * full[700 + n]) < 1e-12);
    }
}

TEST_CASE("apply_awgn") {
    const ComplexVector x = qpsk_stream(1000, 4);
    Rng a(9);
    CHECK(apply_awgn(x, kNoNoise, 1.0, a) == x);

    Rng r1(10), r2(10);
    CHECK(apply_awgn(x, 3.0, 1.0, r1) == apply_awgn(x, 3.0, 1.0, r2));

    const std::size_t n = 1'000'000;
    const ComplexVector zero(n, Complex{});
    Rng r(11);
    const double snr_db = 7.0;
    const ComplexVector noise = apply_awgn(zero, snr_db, 2.0, r);
    const double target = 2.0 * std::pow(10.0, -snr_db / 10.0);
    CHECK(std::abs(mean_power(noise) / target - 1.0) < 0.01);
    Complex mean{};
    double re2 = 0.0;
    for (const auto& v : noise) {
        mean += v;
        re2 += v.real() * v.real();
    }
    CHECK(std::abs(mean) / static_cast<double>(n) < 0.01);
    CHECK(re2 / static_cast<double>(n) == doctest::Approx(target / 2.0).epsilon(0.01));  // circular
}

TEST_CASE("multipath rejects AWGN") {
    const ComplexVector x = qpsk_stream(10, 5);
    Rng rng(1);
    CHECK_THROWS_WITH_AS(apply_multipath(x, make_scenario(Scenario::awgn, 10.0, 0.0), kParams, rng),
                         "multipath not applicable", std::invalid_argument);
}

TEST_CASE("pure LOS single tap is a unit-modulus constant") {
    ChannelConfig c = make_scenario(Scenario::enr, 10.0, 0.0);
    c.tap_delays_us = {0.0};
    c.tap_powers_db = {0.0};
    c.rician_k_db = std::numeric_limits<double>::infinity();
    const ComplexVector x = qpsk_stream(2000, 6);
    Rng rng(12);
    const ComplexVector y = apply_multipath(x, c, kParams, rng);
    const Complex h = y[0] / x[0];
    CHECK(std::abs(h) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t n = 0; n < x.size(); ++n) {
        CHECK(std::abs(y[n] - h * x[n]) < 1e-12);
    }
}

TEST_CASE("preset tap delays in samples") {
    CHECK(tap_delays_samples(make_scenario(Scenario::enr, 10.0, 0.0), kParams) == std::vector<int>{0, 1, 38});
    CHECK(tap_delays_samples(make_scenario(Scenario::tma, 10.0, 0.0), kParams) == std::vector<int>{0, 6, 12, 19, 25});
    const ChannelConfig tma = make_scenario(Scenario::tma, 10.0, 0.0);
    CHECK(tma.rician_k_db == 10.0);
    CHECK(tma.doppler_max_hz == 624.0);
    CHECK(*std::max_element(tma.tap_delays_us.begin(), tma.tap_delays_us.end()) == 10.0);
    const ChannelConfig enr = make_scenario(Scenario::enr, 10.0, 0.0);
    CHECK(enr.doppler_max_hz == 1250.0);
    CHECK(enr.dme.empty());
    CHECK(make_scenario(Scenario::enr_dme, 10.0, 0.0).dme.size() == 3);
}

TEST_CASE("multipath preserves long-run average power") {
    for (Scenario s : {Scenario::enr, Scenario::tma}) {
        double in = 0.0;
        double out = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ComplexVector x = qpsk_stream(100'000, 100 + seed);
            Rng rng(seed);
            const ComplexVector y = apply_multipath(x, make_scenario(s, 10.0, 0.0), kParams, rng);
            in += mean_power(x);
            out += mean_power(std::span<const Complex>(y).subspan(100));
        }
        CHECK(std::abs(out / in - 1.0) < 0.02);
    }
}

TEST_CASE("multipath is deterministic in the rng seed") {
    const ComplexVector x = qpsk_stream(5000, 7);
    Rng a(77), b(77);
    const auto cfg = make_scenario(Scenario::tma, 10.0, 0.0);
    CHECK(apply_multipath(x, cfg, kParams, a) == apply_multipath(x, cfg, kParams, b));
}

TEST_CASE("dme pulse pairs arrive at 3600 per second") {
    const auto sources = default_dme_sources();
    REQUIRE(sources.size() == 3);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        CHECK(sources[i].pulse_pair_rate == 3600.0);
        Rng rng(500 + i);
        const auto t = dme_arrivals(sources[i].pulse_pair_rate, 0.0, 1.0, rng);
        CHECK(std::abs(static_cast<double>(t.size()) - 3600.0) <= 3.0 * std::sqrt(3600.0));
        CHECK(std::is_sorted(t.begin(), t.end()));
    }
    CHECK(sources[0].freq_offset_hz == -0.5e6);
    CHECK(sources[0].power_dbm == -67.9);
    CHECK(sources[1].freq_offset_hz == 0.5e6);
    CHECK(sources[1].power_dbm == -74.0);
    CHECK(sources[2].freq_offset_hz == 0.5e6);
    CHECK(sources[2].power_dbm == -90.3);
}

TEST_CASE("dme without sources is the identity") {
    const ComplexVector x = qpsk_stream(100, 8);
    Rng rng(3);
    CHECK(apply_dme(x, {}, make_scenario(Scenario::awgn, 10.0, 0.0), kParams, rng) == x);
}

TEST_CASE("dme power and spectral location") {
    const std::size_t n = 2'500'000;  // 1 s
    const ComplexVector zero(n, Complex{});
    ChannelConfig cfg = make_scenario(Scenario::enr_dme, 10.0, 0.0);
    const DmeSource src = default_dme_sources()[0];
    Rng rng(21);
    const ComplexVector y = apply_dme(zero, std::vector<DmeSource>{src}, cfg, kParams, rng);

    const double target = std::pow(10.0, (src.power_dbm - cfg.signal_power_dbm) / 10.0);
    CHECK(std::abs(10.0 * std::log10(mean_power(y) / target)) < 0.5);

    // Averaged periodogram with 64-point segments, peak within one bin of the offset.
    const std::size_t seg = 64;
    std::vector<double> psd(seg, 0.0);
    for (std::size_t s = 0; s + seg <= n; s += seg) {
        const ComplexVector f = forward_dft(std::span<const Complex>(y).subspan(s, seg));
        for (std::size_t k = 0; k < seg; ++k) {
            psd[k] += std::norm(f[k]);
        }
    }
    const auto peak = static_cast<int>(std::max_element(psd.begin(), psd.end()) - psd.begin());
    const double bin_hz = kParams.sample_rate_hz() / static_cast<double>(seg);
    const double peak_hz = (peak >= static_cast<int>(seg) / 2 ? peak - static_cast<int>(seg) : peak) * bin_hz;
    CHECK(std::abs(peak_hz - src.freq_offset_hz) <= bin_hz);
}

TEST_CASE("phase noise") {
    const ComplexVector x = qpsk_stream(1000, 9);
    Rng a(1);
    CHECK(apply_phase_noise(x, 0.0, kParams, a) == x);
    Rng b(2), c(2);
    const ComplexVector y = apply_phase_noise(x, 100.0, kParams, b);
    CHECK(y == apply_phase_noise(x, 100.0, kParams, c));
    CHECK(y != x);
    for (std::size_t n = 0; n < x.size(); ++n) {
        CHECK(std::abs(y[n]) == doctest::Approx(std::abs(x[n])));
    }
}

TEST_CASE("receive filter design") {
    const auto h = design_lowpass(0.7e6, 140e3, kParams.sample_rate_hz());
    CHECK(h.size() % 2 == 1);
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(h[k] == doctest::Approx(h[h.size() - 1 - k]).epsilon(1e-12));
    }
    ComplexVector impulse(h.size() + 20, Complex{});
    impulse[10 + h.size() / 2] = 1.0;
    const ComplexVector y = apply_fir_centred(impulse, h);
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(y[10 + k].real() == doctest::Approx(h[k]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(apply_fir_centred(impulse, std::vector<double>{0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(design_lowpass(1.3e6, 1e5, kParams.sample_rate_hz()), std::invalid_argument);
}

TEST_CASE("noiseless AWGN trial carries the exact template at true_sto") {
    const TrialStream t = build_trial_stream(tpl(), make_scenario(Scenario::awgn, kNoNoise, 0.0), kParams, 42);
    for (std::size_t i = 0; i < tpl().samples.size(); ++i) {
        CHECK(t.samples[static_cast<std::size_t>(t.true_sto) + i] == tpl().samples[i]);
    }
    for (std::int64_t i = 0; i < t.true_sto; ++i) {
        CHECK(t.samples[static_cast<std::size_t>(i)] == Complex{});
    }
    CHECK(t.samples.size() >= static_cast<std::size_t>(t.true_sto) + tpl().samples.size() + 2 * kParams.N());
}

TEST_CASE("trial streams are deterministic and true_sto is in range") {
    for (Scenario s : {Scenario::awgn, Scenario::enr, Scenario::enr_dme, Scenario::tma}) {
        const auto cfg = make_scenario(s, 5.0, 0.7);
        const TrialStream a = build_trial_stream(tpl(), cfg, kParams, 99);
        const TrialStream b = build_trial_stream(tpl(), cfg, kParams, 99);
        CHECK(a.samples == b.samples);
        CHECK(a.true_sto == b.true_sto);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const TrialStream t = build_trial_stream(tpl(), cfg, kParams, seed);
            CHECK(t.true_sto >= 4 * kParams.N());
            CHECK(t.true_sto <= 8 * kParams.N());
        }
    }
}

TEST_CASE("CFO phase relation over symbol 1") {
    for (double eps : {-1.9, -1.0, -0.3, 0.0, 0.45, 1.5, 1.9}) {
        const TrialStream t = build_trial_stream(tpl(), make_scenario(Scenario::awgn, kNoNoise, eps), kParams, 5);
        const int l = kParams.L();
        const auto body = static_cast<std::size_t>(t.true_sto + kParams.cp_len);
        Complex sum{};
        for (std::size_t n = body + static_cast<std::size_t>(l); n < body + static_cast<std::size_t>(kParams.N()); ++n) {
            sum += std::conj(t.samples[n]) * t.samples[n - static_cast<std::size_t>(l)];
        }
        const double expected = -2.0 * std::numbers::pi * eps * l / kParams.N();
        CHECK(std::abs(std::arg(sum) - expected) < 1e-9);
    }
}

TEST_CASE("SNR calibration over the preamble") {
    const double snr_db = 6.0;
    double ratio_db = 0.0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
        const TrialStream t =
            build_trial_stream(tpl(), make_scenario(Scenario::awgn, snr_db, 0.3), kParams, static_cast<std::uint64_t>(i));
        double ps = 0.0;
        double pn = 0.0;
        for (std::size_t k = 0; k < tpl().samples.size(); ++k) {
            const auto n = static_cast<std::size_t>(t.true_sto) + k;
            ps += std::norm(t.clean[n]);
            pn += std::norm(t.samples[n] - t.clean[n]);
        }
        ratio_db += 10.0 * std::log10(ps / pn);
    }
    CHECK(std::abs(ratio_db / trials - snr_db) < 0.2);
}

TEST_CASE("optional receive filter keeps timing") {
    ChannelConfig cfg = make_scenario(Scenario::awgn, kNoNoise, 0.0);
    cfg.rx_filter_cutoff_hz = 0.9e6;
    const TrialStream t = build_trial_stream(tpl(), cfg, kParams, 8);
    // The filter has zero delay, so the strongest correlation with the
    // template still sits at true_sto.
    std::int64_t best = -1;
    double best_v = -1.0;
    for (std::int64_t d = t.true_sto - 5; d <= t.true_sto + 5; ++d) {
        Complex acc{};
        for (std::size_t i = 0; i < tpl().samples.size(); ++i) {
            acc += std::conj(tpl().samples[i]) * t.samples[static_cast<std::size_t>(d) + i];
        }
        if (std::abs(acc) > best_v) {
            best_v = std::abs(acc);
            best = d;
        }
    }
    CHECK(best == t.true_sto);
}
