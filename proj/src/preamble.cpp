#include "ldacs/preamble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ldacs/ofdm.hpp"
#include "ldacs/rng.hpp"

namespace ldacs {

void PhyParams::validate() const {
    if (oversampling < 1) {
        throw std::invalid_argument("PhyParams: oversampling must be >= 1");
    }
    if (cp_len < 11) {
        throw std::invalid_argument("PhyParams: cp_len must be >= 11");
    }
    if (cp_len > N()) {
        throw std::invalid_argument("PhyParams: cp_len exceeds the FFT length");
    }
    if (win_len < 0 || win_len > cp_len) {
        throw std::invalid_argument("PhyParams: win_len must be in [0, cp_len]");
    }
}

double PreambleTemplate::template_sum() const { return std::accumulate(a.begin(), a.end(), 0.0); }

namespace {

// Rising half of a raised-cosine taper, sampled at bin centres.
std::vector<double> rising_taper(int len) {
    std::vector<double> w(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        w[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / len));
    }
    return w;
}

SubcarrierLoading preamble_loading(int stride, Rng& rng) {
    SubcarrierLoading loading;
    for (int k = -24; k <= 24; k += stride) {
        if (k != 0) {
            loading.emplace_back(k, random_qpsk(rng));
        }
    }
    return loading;
}

}  // namespace

PreambleTemplate generate_preamble(const PhyParams& params, std::uint64_t seed) {
    params.validate();
    Rng rng(seed);

    const int n = params.N();
    const int cp = params.cp_len;
    const int sym_len = params.symbol_len();
    const auto taper = rising_taper(params.win_len);

    ComplexVector body1 = ofdm_body(params, preamble_loading(4, rng));
    ComplexVector body2 = ofdm_body(params, preamble_loading(2, rng));
    // The loadings make the bodies L- and 2L-periodic up to FFT roundoff;
    // replicating the first period makes the repetition bit-exact.
    for (int k = params.L(); k < n; ++k) {
        body1[static_cast<std::size_t>(k)] = body1[static_cast<std::size_t>(k % params.L())];
    }
    for (int k = 2 * params.L(); k < n; ++k) {
        body2[static_cast<std::size_t>(k)] = body2[static_cast<std::size_t>(k % (2 * params.L()))];
    }

    PreambleTemplate tpl;
    tpl.sym1_start = 0;
    tpl.sym2_start = sym_len;
    tpl.align_index = sym_len - 1;
    tpl.samples.assign(static_cast<std::size_t>(2 * sym_len), Complex{});

    const ComplexVector* bodies[2] = {&body1, &body2};
    for (int s = 0; s < 2; ++s) {
        const ComplexVector symbol = add_cyclic_prefix(*bodies[s], cp);
        const int start = s * sym_len;
        for (int i = 0; i < sym_len; ++i) {
            Complex v = symbol[static_cast<std::size_t>(i)];
            if (i < params.win_len) {
                v *= taper[static_cast<std::size_t>(i)];
            }
            tpl.samples[static_cast<std::size_t>(start + i)] += v;
        }
        // Falling cyclic postfix overlaps the next symbol's taper region; the
        // last symbol's postfix is dropped.
        if (s == 0) {
            for (int i = 0; i < params.win_len; ++i) {
                const Complex v = (*bodies[s])[static_cast<std::size_t>(i % n)] * (1.0 - taper[static_cast<std::size_t>(i)]);
                tpl.samples[static_cast<std::size_t>(start + sym_len + i)] += v;
            }
        }
    }

    double power = 0.0;
    for (const auto& v : tpl.samples) {
        power += std::norm(v);
    }
    power /= static_cast<double>(tpl.samples.size());
    const double scale = 1.0 / std::sqrt(power);
    for (auto& v : tpl.samples) {
        v *= scale;
    }

    EnergyTemplate energy = build_energy_template(tpl, params);
    tpl.a = std::move(energy.a);
    tpl.a0 = std::move(energy.a0);
    tpl.a1 = std::move(energy.a1);
    tpl.D = energy.D;
    tpl.nonzero_count = energy.nonzero_count;
    return tpl;
}

EnergyTemplate build_energy_template(const PreambleTemplate& tpl, const PhyParams& params) {
    const int lag = 2 * params.L();
    const int n0 = tpl.align_index;
    if (n0 < lag || n0 >= static_cast<int>(tpl.samples.size())) {
        throw std::invalid_argument("energy template: alignment index out of range");
    }
    EnergyTemplate out;
    out.D = n0 - lag + 1;
    std::vector<double> raw(static_cast<std::size_t>(out.D));
    double peak = 0.0;
    for (int m = 0; m < out.D; ++m) {
        const auto k = static_cast<std::size_t>(n0 - m);
        const double v = std::abs(tpl.samples[k]) * std::abs(tpl.samples[k - static_cast<std::size_t>(lag)]);
        raw[static_cast<std::size_t>(m)] = v;
        peak = std::max(peak, v);
    }
    if (peak <= 0.0) {
        throw std::invalid_argument("empty template");
    }

    out.a.resize(raw.size());
    out.a0.resize(raw.size());
    out.a1.resize(raw.size());
    for (std::size_t m = 0; m < raw.size(); ++m) {
        const double v = raw[m] / peak;
        // Nearest of {0, 0.5, 1}; ties go up.
        const int halves = static_cast<int>(std::floor(v * 2.0 + 0.5));
        const int level = std::clamp(halves, 0, 2);
        out.a0[m] = level == 2 ? 1 : 0;
        out.a1[m] = level == 1 ? 1 : 0;
        out.a[m] = 0.5 * level;
        out.nonzero_count += level != 0 ? 1 : 0;
    }
    return out;
}

}  // namespace ldacs
