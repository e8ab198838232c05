#pragma once

#include <cstdint>
#include <string>

namespace ldacs {

/**
 * Fixed-point format Qi.f.
 *
 * integer_bits counts the sign bit for signed formats, so Q1.15 is the usual
 * 16-bit two's complement sample format. Representable range:
 *   signed:   [-2^(i-1), 2^(i-1) - 2^-f]
 *   unsigned: [0, 2^i - 2^-f]
 */
struct QFormat {
    int integer_bits = 1;
    int fraction_bits = 15;
    bool is_signed = true;

    constexpr int width() const { return integer_bits + fraction_bits; }
    constexpr std::int64_t raw_max() const {
        return is_signed ? (std::int64_t{1} << (width() - 1)) - 1 : (std::int64_t{1} << width()) - 1;
    }
    constexpr std::int64_t raw_min() const {
        return is_signed ? -(std::int64_t{1} << (width() - 1)) : 0;
    }
    double step() const;
    double max_value() const;
    double min_value() const;
    std::string name() const;

    /// Throws std::invalid_argument when the width or sign layout is unusable.
    void validate() const;

    friend constexpr bool operator==(const QFormat&, const QFormat&) = default;
};

constexpr QFormat q_signed(int integer_bits, int fraction_bits) {
    return QFormat{integer_bits, fraction_bits, true};
}
constexpr QFormat q_unsigned(int integer_bits, int fraction_bits) {
    return QFormat{integer_bits, fraction_bits, false};
}

/// Sample format of the receiver input.
inline constexpr QFormat kInputFormat = q_signed(1, 15);

struct FixedValue {
    std::int64_t raw = 0;
    QFormat format{};

    double to_real() const;
};

struct FixedIq {
    FixedValue re;
    FixedValue im;
};

/// Counts clamp events; shared by every saturating operation that is handed one.
struct SaturationCounter {
    std::uint64_t events = 0;
};

/// Right shift by `shift` bits with round-to-nearest, ties away from zero.
/// A negative shift is an exact left shift.
std::int64_t round_shift(std::int64_t value, int shift);

/// Clamp a raw integer into the format range.
std::int64_t saturate_raw(std::int64_t raw, const QFormat& fmt, SaturationCounter* counter = nullptr);

/// Re-express a raw value with `from_fraction_bits` fraction bits in `fmt`
/// (rounding, then saturation).
FixedValue requantize(std::int64_t raw, int from_fraction_bits, const QFormat& fmt,
                      SaturationCounter* counter = nullptr);

FixedValue quantize(double x, const QFormat& fmt, SaturationCounter* counter = nullptr);

FixedIq quantize_iq(double re, double im, const QFormat& fmt, SaturationCounter* counter = nullptr);

/// Exact integer product, then rounding to out_fmt and saturation.
FixedValue fixed_mul(const FixedValue& a, const FixedValue& b, const QFormat& out_fmt,
                     SaturationCounter* counter = nullptr);

inline constexpr int kDefaultCordicIterations = 16;

struct PolarResult {
    FixedValue magnitude;
    double angle = 0.0;  ///< radians in (-pi, pi]
};

/**
 * CORDIC vectoring (rectangular to polar) on raw integer components that
 * share `fraction_bits` fraction bits.
 *
 * The input is pre-rotated into the right half plane, normalized so that
 * the larger component sits just below 2^30, and rotated `iterations`
 * times. The gain (~1.6468) is removed with one constant multiply on the
 * magnitude path; the angle accumulator needs no compensation.
 * z = 0 yields magnitude 0 and angle 0. Requires iterations >= 8.
 */
PolarResult cordic_polar_raw(std::int64_t x, std::int64_t y, int fraction_bits, const QFormat& magnitude_fmt,
                             int iterations = kDefaultCordicIterations, SaturationCounter* counter = nullptr);

/// CORDIC on a FixedIq. The default magnitude format keeps one more integer
/// bit than the input and 15 extra fraction bits (capped at a 32-bit width).
PolarResult cordic_polar(const FixedIq& z, int iterations = kDefaultCordicIterations);
PolarResult cordic_polar(const FixedIq& z, const QFormat& magnitude_fmt, int iterations = kDefaultCordicIterations);

/// Inverse CORDIC gain for the given iteration count, prod 1/sqrt(1 + 2^-2i).
double cordic_gain_compensation(int iterations);

/// Wrap an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace ldacs
