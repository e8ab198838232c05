#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace ldacs {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kBaseSampleRateHz = 625'000.0;
inline constexpr int kBaseFftLength = 64;
inline constexpr std::uint64_t kDefaultPreambleSeed = 0x1DAC51;

/// Static system constants of the receiver.
struct PhyParams {
    int oversampling = 4;  ///< Nov
    int cp_len = 44;       ///< cyclic prefix in oversampled samples (includes the taper)
    int win_len = 8;       ///< raised-cosine taper length

    int L() const { return 16 * oversampling; }
    int N() const { return kBaseFftLength * oversampling; }
    int symbol_len() const { return N() + cp_len; }
    double sample_rate_hz() const { return oversampling * kBaseSampleRateHz; }
    double subcarrier_spacing_hz() const { return kBaseSampleRateHz / kBaseFftLength; }
    /// STO errors at or beyond this many samples count as a failed estimate.
    double fail_threshold() const { return cp_len / 11.0; }

    void validate() const;
};

/// The two-symbol preamble plus the quantized energy template used by XCR.
///
/// Energy template layout: a[m] weights |c2| from m samples before the
/// alignment instant, a[m] = a0[m] + a1[m] / 2 with a[m] in {0, 0.5, 1}.
struct PreambleTemplate {
    ComplexVector samples;
    int sym1_start = 0;
    int sym2_start = 0;
    /// Index (into samples) of the last sample of symbol 1; XCR peaks here.
    int align_index = 0;

    std::vector<double> a;
    std::vector<std::uint8_t> a0;
    std::vector<std::uint8_t> a1;
    int D = 0;
    int nonzero_count = 0;

    double template_sum() const;
};

/// Frequency-domain construction of both preamble symbols. Symbol 1 carries
/// QPSK on subcarriers that are multiples of 4 (L-periodic body), symbol 2
/// on even subcarriers (2L-periodic body). Deterministic in the seed.
PreambleTemplate generate_preamble(const PhyParams& params, std::uint64_t seed = kDefaultPreambleSeed);

struct EnergyTemplate {
    std::vector<double> a;
    std::vector<std::uint8_t> a0;
    std::vector<std::uint8_t> a1;
    int D = 0;
    int nonzero_count = 0;
};

/// a[m] = |p[n0-m]| * |p[n0-m-2L]|, normalized to peak 1 and rounded to the
/// nearest of {0, 0.5, 1}; n0 = template.align_index, D = n0 - 2L + 1.
/// Throws std::invalid_argument("empty template") on an all-zero preamble.
EnergyTemplate build_energy_template(const PreambleTemplate& tpl, const PhyParams& params);

}  // namespace ldacs
