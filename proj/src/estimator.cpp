#include "ldacs/estimator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldacs {

std::string to_string(SyncMode mode) { return mode == SyncMode::fixed ? "fixed" : "float"; }

SyncMode parse_sync_mode(std::string_view name) {
    if (name == "float") {
        return SyncMode::floating;
    }
    if (name == "fixed") {
        return SyncMode::fixed;
    }
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

SyncConfig SyncConfig::defaults(const PhyParams& params) {
    SyncConfig cfg;
    cfg.m_consec = 8 * params.oversampling;
    cfg.delta = 56 * params.oversampling;
    return cfg;
}

void SyncConfig::validate(const PhyParams& params) const {
    if (m_consec < 1) {
        throw std::invalid_argument("SyncConfig: m_consec must be >= 1");
    }
    if (delta < 1 || delta > params.symbol_len()) {
        throw std::invalid_argument("SyncConfig: delta must be in [1, symbol length]");
    }
    if (!(input_rms > 0.0) || !(expected_input_power > 0.0) || !std::isfinite(expected_input_power)) {
        throw std::invalid_argument("SyncConfig: AGC settings must be positive");
    }
    words.validate();
}

bool Detector::update(bool condition) {
    if (fired_) {
        return false;
    }
    run_ = condition ? run_ + 1 : 0;
    if (run_ >= m_consec_) {
        fired_ = true;
        return true;
    }
    return false;
}

std::optional<std::int64_t> detect(std::span<const MetricSnapshot> snapshots, const SyncConfig& cfg) {
    Detector det(cfg.m_consec);
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const auto& s = snapshots[i];
        if (det.update(std::abs(s.ac1) + std::abs(s.ac2) > s.ene)) {
            return static_cast<std::int64_t>(i);
        }
    }
    return std::nullopt;
}

std::int64_t estimate_sto(std::span<const double> xcr, std::int64_t detect_index, const SyncConfig& cfg) {
    const auto size = static_cast<std::int64_t>(xcr.size());
    if (detect_index < 0 || detect_index >= size) {
        throw std::out_of_range("estimate_sto: detection index outside the stream");
    }
    const std::int64_t end = std::min(size, detect_index + cfg.delta);
    std::int64_t best = detect_index;
    for (std::int64_t n = detect_index + 1; n < end; ++n) {
        if (xcr[static_cast<std::size_t>(n)] > xcr[static_cast<std::size_t>(best)]) {
            best = n;
        }
    }
    return best;
}

double wrap_cfo(double eps) {
    while (eps > 2.0) {
        eps -= 4.0;
    }
    while (eps <= -2.0) {
        eps += 4.0;
    }
    return eps;
}

double estimate_cfo(double phi1, double phi2) {
    constexpr double pi = std::numbers::pi;
    double eps = phi2 / pi;
    if (phi1 >= pi / 2) {
        eps += 2.0;
    } else if (phi1 <= -pi / 2) {
        eps -= 2.0;
    }
    const double coarse = 2.0 * phi1 / pi;
    if (eps - coarse > 1.0) {
        eps -= 2.0;
    } else if (coarse - eps > 1.0) {
        eps += 2.0;
    }
    return wrap_cfo(eps);
}

namespace {

struct Tick {
    bool exceeds = false;
    double xcr = 0.0;
    Complex ac1{};
    Complex ac2{};
};

class FloatEngine {
public:
    FloatEngine(const PhyParams& params, const PreambleTemplate& tpl, const SyncConfig&) : state_(params, tpl) {}

    Tick step(Complex r) {
        const auto s = state_.step(r);
        return Tick{std::abs(s.ac1) + std::abs(s.ac2) > s.ene, s.xcr, s.ac1, s.ac2};
    }

    double angle(Complex z) const { return z == Complex{} ? 0.0 : std::arg(z); }
    std::uint64_t saturation_events() const { return 0; }

private:
    MetricState state_;
};

/// Accumulator values travel as exact raw integers inside Complex; the
/// angle of a two-instant AC2 sum goes through one more CORDIC.
class FixedEngine {
public:
    FixedEngine(const PhyParams& params, const PreambleTemplate& tpl, const SyncConfig& cfg)
        : datapath_(params, tpl, cfg.words, cfg.form, cfg.cordic_iterations),
          gain_(cfg.input_rms / std::sqrt(cfg.expected_input_power)),
          fa_(cfg.words.fa),
          iterations_(cfg.cordic_iterations) {}

    Tick step(Complex r) {
        const auto s = datapath_.step(to_fixed_input(r, gain_, &front_end_));
        return Tick{s.ac_exceeds_ene(), static_cast<double>(s.xcr),
                    Complex(static_cast<double>(s.ac1_re), static_cast<double>(s.ac1_im)),
                    Complex(static_cast<double>(s.ac2_re), static_cast<double>(s.ac2_im))};
    }

    double angle(Complex z) const {
        return cordic_polar_raw(std::llround(z.real()), std::llround(z.imag()), fa_, q_unsigned(9, fa_),
                                iterations_)
            .angle;
    }

    std::uint64_t saturation_events() const { return datapath_.saturation_events() + front_end_.events; }

private:
    Datapath datapath_;
    double gain_;
    int fa_;
    int iterations_;
    SaturationCounter front_end_;
};

template <class Engine>
SyncResult run_flow(std::span<const Complex> stream, const PhyParams& params, const PreambleTemplate& tpl,
                    const SyncConfig& cfg, std::int64_t calibration) {
    Engine engine(params, tpl, cfg);
    Detector detector(cfg.m_consec);
    SyncResult res;

    enum class Phase { detecting, searching, awaiting_symbol2 } phase = Phase::detecting;
    std::int64_t window_end = -1;
    std::int64_t symbol2_instant = -1;
    double best_xcr = 0.0;
    Complex ac1_sym1{}, ac2_sym1{}, ac2_sym2{};
    bool have_symbol2 = false;

    const auto size = static_cast<std::int64_t>(stream.size());
    for (std::int64_t n = 0; n < size; ++n) {
        const Tick t = engine.step(stream[static_cast<std::size_t>(n)]);
        res.last_sample_index = n;
        if (phase == Phase::detecting) {
            if (!detector.update(t.exceeds)) {
                continue;
            }
            res.detected = true;
            res.detect_index = n;
            window_end = n + cfg.delta - 1;
            phase = Phase::searching;
            res.peak_index = n;
            best_xcr = t.xcr;
            ac1_sym1 = t.ac1;
            ac2_sym1 = t.ac2;
        } else if (phase == Phase::searching && t.xcr > best_xcr) {
            res.peak_index = n;
            best_xcr = t.xcr;
            ac1_sym1 = t.ac1;
            ac2_sym1 = t.ac2;
        } else if (phase == Phase::awaiting_symbol2 && n == symbol2_instant) {
            ac2_sym2 = t.ac2;
            have_symbol2 = true;
            break;
        }
        if (phase == Phase::searching && n == window_end) {
            // delta <= symbol length keeps this instant strictly ahead.
            symbol2_instant = res.peak_index + params.symbol_len();
            phase = Phase::awaiting_symbol2;
        }
    }
    if (!res.detected) {
        res.saturation_events = engine.saturation_events();
        return res;
    }

    constexpr double pi = std::numbers::pi;
    res.sto_hat = res.peak_index - calibration;
    res.phi1 = -engine.angle(ac1_sym1);
    res.phi2 = -engine.angle(have_symbol2 ? ac2_sym1 + ac2_sym2 : ac2_sym1);
    res.cfo_ac1 = 2.0 * res.phi1 / pi;
    res.cfo_ac2 = -engine.angle(ac2_sym1) / pi;
    res.cfo_hat = estimate_cfo(res.phi1, res.phi2);
    res.saturation_events = engine.saturation_events();
    return res;
}

SyncResult dispatch(std::span<const Complex> stream, const PhyParams& params, const PreambleTemplate& tpl,
                    const SyncConfig& cfg, std::int64_t calibration) {
    cfg.validate(params);
    if (cfg.mode == SyncMode::fixed) {
        return run_flow<FixedEngine>(stream, params, tpl, cfg, calibration);
    }
    return run_flow<FloatEngine>(stream, params, tpl, cfg, calibration);
}

}  // namespace

Synchronizer::Synchronizer(const PhyParams& params, const PreambleTemplate& tpl) : params_(params), tpl_(&tpl) {
    params.validate();
    const std::int64_t lead = 4 * params.N();
    ComplexVector stream(static_cast<std::size_t>(lead), Complex{});
    stream.insert(stream.end(), tpl.samples.begin(), tpl.samples.end());
    stream.resize(stream.size() + static_cast<std::size_t>(params.symbol_len()), Complex{});
    const SyncResult r = dispatch(stream, params_, tpl, SyncConfig::defaults(params), 0);
    if (!r.detected) {
        throw std::logic_error("Synchronizer: calibration run did not detect the preamble");
    }
    calibration_ = r.peak_index - lead;
}

SyncResult Synchronizer::run(std::span<const Complex> stream, const SyncConfig& cfg) const {
    return dispatch(stream, params_, *tpl_, cfg, calibration_);
}

SyncResult synchronize(std::span<const Complex> stream, const PreambleTemplate& tpl, const PhyParams& params,
                       const SyncConfig& cfg) {
    return Synchronizer(params, tpl).run(stream, cfg);
}

}  // namespace ldacs
