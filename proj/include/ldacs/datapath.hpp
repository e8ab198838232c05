#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ldacs/delay_line.hpp"
#include "ldacs/metrics.hpp"
#include "ldacs/numerics.hpp"
#include "ldacs/preamble.hpp"

namespace ldacs {

/// Fraction bits of the metric path (fa: c1/c2/ee and AC1/AC2/ENE) and of
/// the correlator path (fx: |c2| and XCR).
struct WordLengthConfig {
    int fa = 5;
    int fx = 4;

    void validate() const;

    QFormat product_format() const { return q_signed(1, fa); }
    QFormat metric_format() const { return q_signed(8, fa); }
    QFormat energy_format() const { return q_signed(8, fa); }
    QFormat metric_magnitude_format() const { return q_unsigned(8, fa); }
    QFormat c2_magnitude_format() const { return q_unsigned(2, fx); }
    QFormat xcr_format() const { return q_unsigned(8, fx); }
};

/// Receiver front end limits |r| to this before Q1.15 quantization. Any
/// product of two such samples rounds below 1 - 2^-fa for every fa >= 3, so
/// no product or accumulator can clamp.
inline constexpr double kFrontEndClip = 0.96;
/// Inputs up to this magnitude are conforming: the datapath never saturates.
inline constexpr double kConformingInputMagnitude = kFrontEndClip;

/// Gain, magnitude clip, then Q1.15 quantization.
FixedIq to_fixed_input(Complex r, double gain, SaturationCounter* counter = nullptr);

/// Transpose-form multiplierless correlator. Each register holds a running
/// partial sum; taps add x (a = 1) or x/2 (a = 0.5) by shifting. Partial
/// sums carry one guard LSB below Q8.fx so half-weight taps stay exact; the
/// output drops it (floor).
class TransposeCorrelator {
public:
    TransposeCorrelator(const PreambleTemplate& tpl, int fx);

    /// x: |c2| raw in Q2.fx. Returns XCR raw in Q8.fx.
    std::int64_t push(std::int64_t x);

    std::uint64_t overflow_events() const { return overflow_.events; }

private:
    std::vector<std::uint8_t> half_weights_;  // 2 * a[m]
    std::vector<std::int64_t> registers_;     // registers_[k] feeds tap k-1 (k >= 1)
    std::int64_t register_limit_;
    QFormat output_format_;
    SaturationCounter overflow_;
};

/// Direct-form correlator: a delay line of (2 + fx)-bit words feeding two
/// gated adder trees (a0 and a1 bit planes). XCR = S0 + (S1 >> 1).
class DirectCorrelator {
public:
    DirectCorrelator(const PreambleTemplate& tpl, int fx);

    std::int64_t push(std::int64_t x);

    std::uint64_t overflow_events() const { return overflow_.events; }

private:
    std::int64_t tree_sum(const std::vector<std::size_t>& taps);

    int fx_;
    DelayLine<std::int64_t> line_;
    std::vector<std::size_t> taps_a0_;
    std::vector<std::size_t> taps_a1_;
    std::vector<std::int64_t> scratch_;
    SaturationCounter overflow_;
};

std::vector<FixedValue> xcr_transpose(std::span<const FixedValue> c2_mag, const PreambleTemplate& tpl);
std::vector<FixedValue> xcr_direct(std::span<const FixedValue> c2_mag, const PreambleTemplate& tpl);

enum class CorrelatorForm { direct, transpose };

struct FixedSnapshot {
    std::int64_t n = 0;
    std::int64_t ac1_re = 0, ac1_im = 0;  ///< Q8.fa raw
    std::int64_t ac2_re = 0, ac2_im = 0;
    std::int64_t ene = 0;
    std::int64_t ac1_mag = 0, ac2_mag = 0;  ///< CORDIC magnitudes, UQ8.fa raw
    double ac1_angle = 0.0, ac2_angle = 0.0;
    std::int64_t c2_mag = 0;  ///< newest |c2|, UQ2.fx raw
    std::int64_t xcr = 0;     ///< UQ8.fx raw
    int fa = 0;
    int fx = 0;

    /// Detection comparator, |AC1| + |AC2| > ENE.
    bool ac_exceeds_ene() const { return ac1_mag + ac2_mag > ene; }
    MetricSnapshot to_real() const;
};

/// Bit-true model of the synchronizer front half: shared received-sample
/// buffer, product rounding to Q1.fa, three-input recursive adders in Q8.fa,
/// CORDIC phase translation of AC1, AC2 and c2, and the energy correlator.
class Datapath {
public:
    Datapath(const PhyParams& params, const PreambleTemplate& tpl, const WordLengthConfig& words,
             CorrelatorForm form = CorrelatorForm::direct, int cordic_iterations = kDefaultCordicIterations);

    /// r_n must be in Q1.15.
    FixedSnapshot step(const FixedIq& r_n);

    /// Clamp events in products, accumulators and correlator registers.
    std::uint64_t saturation_events() const;

    const WordLengthConfig& words() const { return words_; }

private:
    struct Iq {
        std::int64_t re = 0;
        std::int64_t im = 0;
    };

    WordLengthConfig words_;
    CorrelatorForm form_;
    int cordic_iterations_;
    int l_;
    DelayLine<Iq> rx_;
    DelayLine<Iq> c1_line_;
    DelayLine<Iq> c2_line_;
    DelayLine<std::int64_t> ee_line_;
    Iq ac1_{}, ac2_{};
    std::int64_t ene_ = 0;
    std::int64_t n_ = -1;
    TransposeCorrelator transpose_;
    DirectCorrelator direct_;
    SaturationCounter saturation_;
};

/// Width of an adder at tree level `level` (level 1 adds two delay words).
constexpr int direct_adder_width(int level, int fx) { return 2 + level + fx; }

struct BitwidthReport {
    int fx = 0;
    int D = 0;
    int direct_delay_word_bits = 0;     ///< 2 + fx
    int transpose_delay_word_bits = 0;  ///< 8 + fx
    int transpose_guard_bits = 1;       ///< half-weight LSB carried by the partial sums
    std::int64_t direct_delay_storage_bits = 0;
    std::int64_t transpose_delay_storage_bits = 0;
    int a0_taps = 0;
    int a1_taps = 0;
    std::vector<int> a0_adder_widths;  ///< one entry per tree level
    std::vector<int> a1_adder_widths;
    int output_bits = 0;  ///< 8 + fx
};

/// Analytic storage accounting for both correlator forms. Throws
/// std::logic_error if the direct form would not save delay storage.
BitwidthReport bitwidth_report(const PreambleTemplate& tpl, const WordLengthConfig& cfg);

}  // namespace ldacs
