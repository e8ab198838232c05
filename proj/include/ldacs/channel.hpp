#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldacs/preamble.hpp"
#include "ldacs/rng.hpp"

namespace ldacs {

enum class Scenario { awgn, enr, enr_dme, tma };

std::string to_string(Scenario s);
/// Accepts awgn | enr | enr-dme | tma. Throws std::invalid_argument otherwise.
Scenario parse_scenario(std::string_view name);

struct DmeSource {
    double freq_offset_hz = 0.0;
    double power_dbm = -75.0;
    double pulse_pair_rate = 3600.0;  ///< pairs per second
    double pulse_width_us = 3.5;      ///< half-amplitude width of the Gaussian envelope
    double pair_spacing_us = 12.0;
};

/// Three ground stations around Paris: -0.5 MHz at -67.9 dBm, +0.5 MHz at
/// -74 and -90.3 dBm, 3600 pulse pairs per second each.
std::vector<DmeSource> default_dme_sources();

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct ChannelConfig {
    Scenario scenario = Scenario::awgn;
    double snr_db = kNoNoise;
    double cfo = 0.0;  ///< subcarrier spacings
    std::uint64_t seed = 0;
    double doppler_max_hz = 0.0;
    double rician_k_db = 15.0;  ///< LOS-to-diffuse ratio of the first tap
    std::vector<double> tap_delays_us{0.0};
    std::vector<double> tap_powers_db{0.0};
    std::vector<DmeSource> dme;
    double phase_noise_linewidth_hz = 0.0;
    double signal_power_dbm = -75.0;
    int sinusoids_per_tap = 20;
    /// Optional receiver channel-select filter (6 dB cutoff, transition
    /// width); cutoff 0 disables it. No preset enables it.
    double rx_filter_cutoff_hz = 0.0;
    double rx_filter_transition_hz = 140e3;

    void validate() const;
};

/// Scenario presets: delays, powers, Rician factor, Doppler and DME sources.
ChannelConfig make_scenario(Scenario scenario, double snr_db, double cfo, std::uint64_t seed = 0);

/// y[n] = x[n] exp(j 2 pi eps (n + start_index) / N).
ComplexVector apply_cfo(std::span<const Complex> x, double eps, const PhyParams& params, std::int64_t start_index = 0);

/// Adds circular Gaussian noise of variance signal_power * 10^(-snr_db/10).
/// snr_db = +inf leaves the input untouched.
ComplexVector apply_awgn(std::span<const Complex> x, double snr_db, double signal_power, Rng& rng);

/// Tap delays in samples, round(tau * fs).
std::vector<int> tap_delays_samples(const ChannelConfig& cfg, const PhyParams& params);

/// Time-varying tapped delay line. The first tap is Rician (static LOS plus
/// diffuse part), the rest Rayleigh; diffuse parts are sum-of-sinusoids
/// processes with a Jakes Doppler spectrum. Mean tap powers sum to 1.
/// Throws std::invalid_argument("multipath not applicable") for AWGN.
ComplexVector apply_multipath(std::span<const Complex> x, const ChannelConfig& cfg, const PhyParams& params, Rng& rng);

/// Poisson arrival times (seconds) on [t_begin, t_end).
std::vector<double> dme_arrivals(double rate, double t_begin, double t_end, Rng& rng);

/// Adds Gaussian pulse pairs from each source. Mean source power relative to
/// a unit-power signal is 10^((power_dbm - cfg.signal_power_dbm)/10).
/// The first sample is at t = 0.
ComplexVector apply_dme(std::span<const Complex> x, std::span<const DmeSource> sources, const ChannelConfig& cfg,
                        const PhyParams& params, Rng& rng);

/// Linear-phase low-pass FIR (Blackman-windowed sinc, odd length, unit DC gain).
std::vector<double> design_lowpass(double cutoff_hz, double transition_hz, double sample_rate_hz);

/// Zero-delay FIR filtering: output n is centred on input n, so timing is
/// preserved. Samples beyond the ends count as zero.
ComplexVector apply_fir_centred(std::span<const Complex> x, std::span<const double> taps);

/// Wiener phase noise with the given 3 dB linewidth.
ComplexVector apply_phase_noise(std::span<const Complex> x, double linewidth_hz, const PhyParams& params, Rng& rng);

struct TrialStream {
    ComplexVector samples;
    /// The received signal before DME and thermal noise (faded, CFO-rotated).
    ComplexVector clean;
    std::int64_t true_sto = 0;
    std::int64_t lead_in = 0;
};

/// One Monte Carlo trial: random lead-in of [4N, 8N] samples, the preamble,
/// then two random payload symbols. Impairments in order: multipath, CFO,
/// phase noise, DME, receive filter (if enabled), AWGN. The SNR therefore
/// refers to the filter output. true_sto indexes the first preamble sample on the
/// LOS path.
TrialStream build_trial_stream(const PreambleTemplate& tpl, const ChannelConfig& cfg, const PhyParams& params,
                               std::uint64_t seed);

}  // namespace ldacs
