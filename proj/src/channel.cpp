#include "ldacs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ldacs/ofdm.hpp"

namespace ldacs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Sum-of-sinusoids Rayleigh process with a Jakes Doppler spectrum; unit mean
// power. Phasors advance by a per-sample rotation.
class SosFader {
public:
    SosFader(int sinusoids, double doppler_max_hz, double sample_rate_hz, Rng& rng) {
        const double offset = rng.uniform();
        const double norm = 1.0 / std::sqrt(static_cast<double>(sinusoids));
        for (int i = 0; i < sinusoids; ++i) {
            const double arrival = kTwoPi * (i + offset) / sinusoids;
            const double freq = doppler_max_hz * std::cos(arrival);
            const double phase = kTwoPi * rng.uniform();
            phasors_.push_back(norm * std::polar(1.0, phase));
            steps_.push_back(std::polar(1.0, kTwoPi * freq / sample_rate_hz));
        }
    }

    Complex next() {
        Complex sum{};
        for (std::size_t i = 0; i < phasors_.size(); ++i) {
            sum += phasors_[i];
            phasors_[i] *= steps_[i];
        }
        return sum;
    }

private:
    ComplexVector phasors_;
    ComplexVector steps_;
};

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::awgn:
            return "awgn";
        case Scenario::enr:
            return "enr";
        case Scenario::enr_dme:
            return "enr-dme";
        case Scenario::tma:
            return "tma";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    if (name == "awgn") return Scenario::awgn;
    if (name == "enr") return Scenario::enr;
    if (name == "enr-dme" || name == "enr_dme") return Scenario::enr_dme;
    if (name == "tma") return Scenario::tma;
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::vector<DmeSource> default_dme_sources() {
    return {
        DmeSource{-0.5e6, -67.9, 3600.0, 3.5, 12.0},
        DmeSource{+0.5e6, -74.0, 3600.0, 3.5, 12.0},
        DmeSource{+0.5e6, -90.3, 3600.0, 3.5, 12.0},
    };
}

void ChannelConfig::validate() const {
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("ChannelConfig: snr_db must be a number or +inf");
    }
    if (!std::isfinite(cfo) || std::abs(cfo) >= 2.0) {
        throw std::invalid_argument("ChannelConfig: |cfo| must be < 2");
    }
    if (tap_delays_us.size() != tap_powers_db.size() || tap_delays_us.empty()) {
        throw std::invalid_argument("ChannelConfig: tap lists must be non-empty and of equal length");
    }
    for (const auto& src : dme) {
        if (!(src.pulse_pair_rate > 0.0)) {
            throw std::invalid_argument("DmeSource: pulse_pair_rate must be > 0");
        }
    }
    if (rx_filter_cutoff_hz < 0.0 || (rx_filter_cutoff_hz > 0.0 && !(rx_filter_transition_hz > 0.0))) {
        throw std::invalid_argument("ChannelConfig: receive filter needs cutoff >= 0 and transition > 0");
    }
    if (sinusoids_per_tap < 16) {
        throw std::invalid_argument("ChannelConfig: at least 16 sinusoids per tap");
    }
}

ChannelConfig make_scenario(Scenario scenario, double snr_db, double cfo, std::uint64_t seed) {
    ChannelConfig cfg;
    cfg.scenario = scenario;
    cfg.snr_db = snr_db;
    cfg.cfo = cfo;
    cfg.seed = seed;
    switch (scenario) {
        case Scenario::awgn:
            break;
        case Scenario::enr_dme:
            cfg.dme = default_dme_sources();
            [[fallthrough]];
        case Scenario::enr:
            cfg.doppler_max_hz = 1250.0;
            cfg.rician_k_db = 15.0;
            cfg.tap_delays_us = {0.0, 0.3, 15.0};
            cfg.tap_powers_db = {0.0, -10.0, -15.0};
            break;
        case Scenario::tma:
            cfg.doppler_max_hz = 624.0;
            cfg.rician_k_db = 10.0;
            cfg.tap_delays_us = {0.0, 2.5, 5.0, 7.5, 10.0};
            cfg.tap_powers_db = {0.0, -10.0, -13.0, -16.0, -19.0};
            break;
    }
    return cfg;
}

ComplexVector apply_cfo(std::span<const Complex> x, double eps, const PhyParams& params, std::int64_t start_index) {
    ComplexVector y(x.size());
    const double rate = kTwoPi * eps / params.N();
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double phase = rate * static_cast<double>(start_index + static_cast<std::int64_t>(n));
        y[n] = x[n] * std::polar(1.0, phase);
    }
    return y;
}

ComplexVector apply_awgn(std::span<const Complex> x, double snr_db, double signal_power, Rng& rng) {
    ComplexVector y(x.begin(), x.end());
    if (snr_db == kNoNoise) {
        return y;
    }
    if (!(signal_power > 0.0)) {
        throw std::invalid_argument("apply_awgn: signal_power must be > 0");
    }
    const double variance = signal_power * db_to_linear(-snr_db);
    for (auto& v : y) {
        v += rng.complex_normal(variance);
    }
    return y;
}

std::vector<int> tap_delays_samples(const ChannelConfig& cfg, const PhyParams& params) {
    std::vector<int> delays;
    for (double tau : cfg.tap_delays_us) {
        delays.push_back(static_cast<int>(std::lround(tau * 1e-6 * params.sample_rate_hz())));
    }
    return delays;
}

ComplexVector apply_multipath(std::span<const Complex> x, const ChannelConfig& cfg, const PhyParams& params, Rng& rng) {
    if (cfg.scenario == Scenario::awgn) {
        throw std::invalid_argument("multipath not applicable");
    }
    cfg.validate();
    const auto delays = tap_delays_samples(cfg, params);
    const std::size_t taps = delays.size();

    std::vector<double> powers(taps);
    double total = 0.0;
    for (std::size_t l = 0; l < taps; ++l) {
        powers[l] = db_to_linear(cfg.tap_powers_db[l]);
        total += powers[l];
    }
    for (auto& p : powers) {
        p /= total;
    }

    const double k_lin = db_to_linear(cfg.rician_k_db);
    const double los_share = std::isinf(k_lin) ? 1.0 : k_lin / (k_lin + 1.0);
    const Complex los = std::sqrt(powers[0] * los_share) * std::polar(1.0, kTwoPi * rng.uniform());

    std::vector<double> diffuse_amp(taps);
    std::vector<SosFader> faders;
    faders.reserve(taps);
    for (std::size_t l = 0; l < taps; ++l) {
        const double share = (l == 0) ? 1.0 - los_share : 1.0;
        diffuse_amp[l] = std::sqrt(powers[l] * share);
        faders.emplace_back(cfg.sinusoids_per_tap, cfg.doppler_max_hz, params.sample_rate_hz(), rng);
    }

    ComplexVector y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        Complex acc{};
        for (std::size_t l = 0; l < taps; ++l) {
            Complex h = diffuse_amp[l] * faders[l].next();
            if (l == 0) {
                h += los;
            }
            const auto d = static_cast<std::size_t>(delays[l]);
            if (n >= d) {
                acc += h * x[n - d];
            }
        }
        y[n] = acc;
    }
    return y;
}

std::vector<double> dme_arrivals(double rate, double t_begin, double t_end, Rng& rng) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("dme_arrivals: rate must be > 0");
    }
    std::vector<double> times;
    double t = t_begin + rng.exponential(rate);
    while (t < t_end) {
        times.push_back(t);
        t += rng.exponential(rate);
    }
    return times;
}

ComplexVector apply_dme(std::span<const Complex> x, std::span<const DmeSource> sources, const ChannelConfig& cfg,
                        const PhyParams& params, Rng& rng) {
    ComplexVector y(x.begin(), x.end());
    if (sources.empty()) {
        return y;
    }
    const double fs = params.sample_rate_hz();
    for (const auto& src : sources) {
        if (std::abs(src.freq_offset_hz) >= fs / 2.0) {
            throw std::invalid_argument("apply_dme: offset not representable at this sample rate");
        }
    }
    const double duration = static_cast<double>(x.size()) / fs;

    for (const auto& src : sources) {
        const double width = src.pulse_width_us * 1e-6;
        const double spacing = src.pair_spacing_us * 1e-6;
        const double alpha = 4.0 * std::numbers::ln2 / (width * width);
        const double pair_energy = 2.0 * std::sqrt(std::numbers::pi / (2.0 * alpha));
        const double mean_power = db_to_linear(src.power_dbm - cfg.signal_power_dbm);
        const double amplitude = std::sqrt(mean_power / (src.pulse_pair_rate * pair_energy));
        const double reach = 4.0 * width;

        for (double t0 : dme_arrivals(src.pulse_pair_rate, -(spacing + reach), duration + reach, rng)) {
            const double carrier_phase = kTwoPi * rng.uniform();
            for (double centre : {t0, t0 + spacing}) {
                const auto first = static_cast<std::int64_t>(std::ceil((centre - reach) * fs));
                const auto last = static_cast<std::int64_t>(std::floor((centre + reach) * fs));
                for (std::int64_t n = std::max<std::int64_t>(first, 0);
                     n <= last && n < static_cast<std::int64_t>(y.size()); ++n) {
                    const double t = static_cast<double>(n) / fs;
                    const double env = amplitude * std::exp(-alpha * (t - centre) * (t - centre));
                    y[static_cast<std::size_t>(n)] += env * std::polar(1.0, kTwoPi * src.freq_offset_hz * t + carrier_phase);
                }
            }
        }
    }
    return y;
}

std::vector<double> design_lowpass(double cutoff_hz, double transition_hz, double sample_rate_hz) {
    if (!(cutoff_hz > 0.0) || !(transition_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0) {
        throw std::invalid_argument("design_lowpass: need 0 < cutoff < fs/2 and transition > 0");
    }
    // Blackman main lobe: transition ~ 5.5 fs / length.
    auto half = static_cast<int>(std::ceil(5.5 * sample_rate_hz / transition_hz / 2.0));
    const int len = 2 * half + 1;
    const double fc = cutoff_hz / sample_rate_hz;
    std::vector<double> h(static_cast<std::size_t>(len));
    double sum = 0.0;
    for (int k = 0; k < len; ++k) {
        const int m = k - half;
        const double sinc = (m == 0) ? 2.0 * fc : std::sin(kTwoPi * fc * m) / (std::numbers::pi * m);
        const double w = 0.42 - 0.5 * std::cos(kTwoPi * k / (len - 1)) + 0.08 * std::cos(2.0 * kTwoPi * k / (len - 1));
        h[static_cast<std::size_t>(k)] = sinc * w;
        sum += h[static_cast<std::size_t>(k)];
    }
    for (auto& v : h) {
        v /= sum;
    }
    return h;
}

ComplexVector apply_fir_centred(std::span<const Complex> x, std::span<const double> taps) {
    if (taps.empty() || taps.size() % 2 == 0) {
        throw std::invalid_argument("apply_fir_centred: odd tap count required");
    }
    const auto n = static_cast<std::int64_t>(x.size());
    const auto half = static_cast<std::int64_t>(taps.size() / 2);
    ComplexVector y(x.size());
    for (std::int64_t i = 0; i < n; ++i) {
        Complex acc{};
        const std::int64_t k_lo = std::max<std::int64_t>(0, i + half - (n - 1));
        const std::int64_t k_hi = std::min<std::int64_t>(2 * half, i + half);
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            acc += taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i + half - k)];
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

ComplexVector apply_phase_noise(std::span<const Complex> x, double linewidth_hz, const PhyParams& params, Rng& rng) {
    ComplexVector y(x.begin(), x.end());
    if (linewidth_hz <= 0.0) {
        return y;
    }
    const double sigma = std::sqrt(kTwoPi * linewidth_hz / params.sample_rate_hz());
    double phase = 0.0;
    for (auto& v : y) {
        phase += sigma * rng.normal();
        v *= std::polar(1.0, phase);
    }
    return y;
}

TrialStream build_trial_stream(const PreambleTemplate& tpl, const ChannelConfig& cfg, const PhyParams& params,
                               std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    const int n = params.N();

    TrialStream out;
    out.lead_in = rng.uniform_int(4 * n, 8 * n);
    out.true_sto = out.lead_in;

    ComplexVector tx(static_cast<std::size_t>(out.lead_in));
    tx.insert(tx.end(), tpl.samples.begin(), tpl.samples.end());
    for (int s = 0; s < 2; ++s) {
        const ComplexVector sym = random_payload_symbol(params, rng);
        tx.insert(tx.end(), sym.begin(), sym.end());
    }

    ComplexVector rx = (cfg.scenario == Scenario::awgn) ? tx : apply_multipath(tx, cfg, params, rng);
    rx = apply_cfo(rx, cfg.cfo, params);
    rx = apply_phase_noise(rx, cfg.phase_noise_linewidth_hz, params, rng);
    out.clean = rx;
    rx = apply_dme(rx, cfg.dme, cfg, params, rng);
    if (cfg.rx_filter_cutoff_hz > 0.0) {
        const auto taps = design_lowpass(cfg.rx_filter_cutoff_hz, cfg.rx_filter_transition_hz, params.sample_rate_hz());
        out.clean = apply_fir_centred(out.clean, taps);
        rx = apply_fir_centred(rx, taps);
    }
    out.samples = apply_awgn(rx, cfg.snr_db, 1.0, rng);
    return out;
}

}  // namespace ldacs
