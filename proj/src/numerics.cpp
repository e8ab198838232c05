#include "ldacs/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace ldacs {

namespace {

constexpr int kAngleFractionBits = 40;
constexpr int kCordicMaxIterations = 40;
constexpr int kNormalizedTopBit = 30;
constexpr int kGainFractionBits = 30;

struct CordicTables {
    std::array<std::int64_t, kCordicMaxIterations> atan_raw{};
    std::array<std::int64_t, kCordicMaxIterations + 1> gain_raw{};  // gain_raw[k]: compensation after k iterations
};

const CordicTables& cordic_tables() {
    static const CordicTables tables = [] {
        CordicTables t;
        double gain = 1.0;
        t.gain_raw[0] = std::llround(std::ldexp(1.0, kGainFractionBits));
        for (int i = 0; i < kCordicMaxIterations; ++i) {
            t.atan_raw[i] = std::llround(std::ldexp(std::atan(std::ldexp(1.0, -i)), kAngleFractionBits));
            gain /= std::sqrt(1.0 + std::ldexp(1.0, -2 * i));
            t.gain_raw[i + 1] = std::llround(std::ldexp(gain, kGainFractionBits));
        }
        return t;
    }();
    return tables;
}

int top_bit(std::uint64_t v) {
    int bit = -1;
    while (v != 0) {
        v >>= 1;
        ++bit;
    }
    return bit;
}

}  // namespace

double QFormat::step() const { return std::ldexp(1.0, -fraction_bits); }

double QFormat::max_value() const { return std::ldexp(static_cast<double>(raw_max()), -fraction_bits); }

double QFormat::min_value() const { return std::ldexp(static_cast<double>(raw_min()), -fraction_bits); }

std::string QFormat::name() const {
    return std::string(is_signed ? "Q" : "UQ") + std::to_string(integer_bits) + "." + std::to_string(fraction_bits);
}

void QFormat::validate() const {
    if (fraction_bits < 0 || integer_bits < 0) {
        throw std::invalid_argument("QFormat: negative bit count");
    }
    if (is_signed && integer_bits < 1) {
        throw std::invalid_argument("QFormat: signed formats need the sign bit");
    }
    if (width() < 1 || width() > 32) {
        throw std::invalid_argument("QFormat: width must be in [1, 32]");
    }
}

double FixedValue::to_real() const { return std::ldexp(static_cast<double>(raw), -format.fraction_bits); }

std::int64_t round_shift(std::int64_t value, int shift) {
    if (shift <= 0) {
        return value * (std::int64_t{1} << (-shift));
    }
    const std::int64_t half = std::int64_t{1} << (shift - 1);
    if (value >= 0) {
        return (value + half) >> shift;
    }
    return -((-value + half) >> shift);
}

std::int64_t saturate_raw(std::int64_t raw, const QFormat& fmt, SaturationCounter* counter) {
    const std::int64_t hi = fmt.raw_max();
    const std::int64_t lo = fmt.raw_min();
    if (raw > hi || raw < lo) {
        if (counter != nullptr) {
            ++counter->events;
        }
        return std::clamp(raw, lo, hi);
    }
    return raw;
}

FixedValue requantize(std::int64_t raw, int from_fraction_bits, const QFormat& fmt, SaturationCounter* counter) {
    const std::int64_t shifted = round_shift(raw, from_fraction_bits - fmt.fraction_bits);
    return FixedValue{saturate_raw(shifted, fmt, counter), fmt};
}

FixedValue quantize(double x, const QFormat& fmt, SaturationCounter* counter) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("quantize: non-finite input");
    }
    const double scaled = std::ldexp(x, fmt.fraction_bits);
    // Clamp before llround so huge inputs cannot overflow the conversion.
    const double lo = static_cast<double>(fmt.raw_min()) - 1.0;
    const double hi = static_cast<double>(fmt.raw_max()) + 1.0;
    const std::int64_t rounded = std::llround(std::clamp(scaled, lo, hi));  // ties away from zero
    return FixedValue{saturate_raw(rounded, fmt, counter), fmt};
}

FixedIq quantize_iq(double re, double im, const QFormat& fmt, SaturationCounter* counter) {
    return FixedIq{quantize(re, fmt, counter), quantize(im, fmt, counter)};
}

FixedValue fixed_mul(const FixedValue& a, const FixedValue& b, const QFormat& out_fmt, SaturationCounter* counter) {
    const std::int64_t product = a.raw * b.raw;
    return requantize(product, a.format.fraction_bits + b.format.fraction_bits, out_fmt, counter);
}

double cordic_gain_compensation(int iterations) {
    if (iterations < 0 || iterations > kCordicMaxIterations) {
        throw std::invalid_argument("cordic: iteration count out of range");
    }
    return std::ldexp(static_cast<double>(cordic_tables().gain_raw[iterations]), -kGainFractionBits);
}

double wrap_angle(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::remainder(angle, two_pi);  // [-pi, pi]
    if (a <= -std::numbers::pi) {
        a += two_pi;
    }
    return a;
}

PolarResult cordic_polar_raw(std::int64_t x, std::int64_t y, int fraction_bits, const QFormat& magnitude_fmt,
                             int iterations, SaturationCounter* counter) {
    if (iterations < 8 || iterations > kCordicMaxIterations) {
        throw std::invalid_argument("cordic: iterations must be in [8, 40]");
    }
    if (x == 0 && y == 0) {
        return PolarResult{FixedValue{0, magnitude_fmt}, 0.0};
    }

    // Pre-rotation by pi into the right half plane.
    double base_angle = 0.0;
    if (x < 0) {
        base_angle = (y >= 0) ? std::numbers::pi : -std::numbers::pi;
        x = -x;
        y = -y;
    }

    // Normalize so the larger component has its top bit at kNormalizedTopBit.
    const auto largest = static_cast<std::uint64_t>(std::max(std::llabs(x), std::llabs(y)));
    const int shift = kNormalizedTopBit - top_bit(largest);
    if (shift >= 0) {
        x <<= shift;
        y <<= shift;
    } else {
        x = round_shift(x, -shift);
        y = round_shift(y, -shift);
    }

    const auto& tables = cordic_tables();
    std::int64_t z = 0;
    for (int i = 0; i < iterations; ++i) {
        const std::int64_t xs = x >> i;
        const std::int64_t ys = y >> i;
        if (y > 0) {
            x += ys;
            y -= xs;
            z += tables.atan_raw[i];
        } else {
            x -= ys;
            y += xs;
            z -= tables.atan_raw[i];
        }
    }

    const std::int64_t compensated = round_shift(x * tables.gain_raw[iterations], kGainFractionBits);
    const FixedValue magnitude = requantize(compensated, fraction_bits + shift, magnitude_fmt, counter);
    const double angle = wrap_angle(base_angle + std::ldexp(static_cast<double>(z), -kAngleFractionBits));
    return PolarResult{magnitude, angle};
}

PolarResult cordic_polar(const FixedIq& z, int iterations) {
    const QFormat& in = z.re.format;
    const int integer_bits = in.integer_bits + 1;
    const int fraction_bits = std::min(in.fraction_bits + 15, 32 - integer_bits);
    return cordic_polar(z, q_unsigned(integer_bits, fraction_bits), iterations);
}

PolarResult cordic_polar(const FixedIq& z, const QFormat& magnitude_fmt, int iterations) {
    if (!(z.re.format == z.im.format)) {
        throw std::invalid_argument("cordic: components must share one format");
    }
    return cordic_polar_raw(z.re.raw, z.im.raw, z.re.format.fraction_bits, magnitude_fmt, iterations);
}

}  // namespace ldacs
