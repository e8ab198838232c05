#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ldacs/numerics.hpp"

using namespace ldacs;

TEST_CASE("qformat ranges") {
    const QFormat q115 = q_signed(1, 15);
    CHECK(q115.width() == 16);
    CHECK(q115.raw_max() == 32767);
    CHECK(q115.raw_min() == -32768);
    CHECK(q115.min_value() == -1.0);
    CHECK(q115.max_value() == 1.0 - std::ldexp(1.0, -15));

    const QFormat uq2 = q_unsigned(2, 4);
    CHECK(uq2.raw_min() == 0);
    CHECK(uq2.max_value() == 4.0 - 1.0 / 16.0);
    CHECK(uq2.name() == "UQ2.4");

    CHECK_THROWS_AS(q_signed(0, 8).validate(), std::invalid_argument);
    CHECK_THROWS_AS(q_signed(8, 25).validate(), std::invalid_argument);
    CHECK_NOTHROW(q_signed(8, 24).validate());
}

TEST_CASE("quantize examples") {
    CHECK(quantize(0.5, q_signed(1, 5)).raw == 16);
    CHECK(quantize(1.0, q_signed(1, 15)).to_real() == 0.999969482421875);
    CHECK(quantize(-0.26, q_signed(1, 2)).to_real() == -0.25);
}

TEST_CASE("quantize rounds ties away from zero and counts clamps") {
    CHECK(quantize(0.125, q_signed(1, 2)).raw == 1);   // 0.5 LSB
    CHECK(quantize(-0.125, q_signed(1, 2)).raw == -1);
    CHECK(quantize(0.375, q_signed(1, 2)).raw == 2);   // 1.5 LSB
    SaturationCounter c;
    CHECK(quantize(-3.0, q_signed(1, 15), &c).raw == -32768);
    CHECK(quantize(-1.0, q_signed(1, 15), &c).raw == -32768);
    CHECK(c.events == 1);
    CHECK(quantize(-0.1, q_unsigned(2, 4), &c).raw == 0);
    CHECK(c.events == 2);
}

TEST_CASE("quantize error is at most half an LSB in range") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0 - std::ldexp(1.0, -6));
    const QFormat f = q_signed(1, 5);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(gen);
        CHECK(std::abs(quantize(x, f).to_real() - x) <= std::ldexp(1.0, -6));
    }
}

TEST_CASE("round_shift") {
    CHECK(round_shift(5, 1) == 3);
    CHECK(round_shift(-5, 1) == -3);
    CHECK(round_shift(4, 1) == 2);
    CHECK(round_shift(-7, 2) == -2);
    CHECK(round_shift(3, -2) == 12);
    CHECK(round_shift(0, 10) == 0);
}

TEST_CASE("fixed_mul examples") {
    const QFormat in = q_signed(1, 15);
    const QFormat out = q_signed(1, 5);
    CHECK(fixed_mul(quantize(0.5, in), quantize(0.5, in), out).to_real() == 0.25);
    CHECK(fixed_mul(quantize(-1.0, in), quantize(0.0, in), out).raw == 0);

    // Exact rational oracle: 0.75 = 24576 / 2^15, product 24576^2 / 2^30.
    const std::int64_t p = std::int64_t{24576} * 24576;
    const std::int64_t expected = (p + (std::int64_t{1} << 24)) >> 25;  // to 2^-5, nearest
    const FixedValue m = fixed_mul(quantize(0.75, in), quantize(0.75, in), out);
    CHECK(m.raw == expected);
    CHECK(m.to_real() == 0.5625);
    CHECK(m.to_real() == quantize(0.5625, out).to_real());
}

TEST_CASE("fixed_mul saturates instead of wrapping") {
    const QFormat in = q_signed(1, 15);
    SaturationCounter c;
    const FixedValue m = fixed_mul(quantize(-1.0, in), quantize(-1.0, in), q_signed(1, 5), &c);
    CHECK(m.raw == 31);
    CHECK(c.events == 1);
}

TEST_CASE("requantize") {
    CHECK(requantize(48, 5, q_signed(2, 3)).raw == 12);
    CHECK(requantize(48, 5, q_signed(1, 3)).raw == 7);
    CHECK(requantize(-3, 2, q_signed(2, 4)).raw == -12);
}

TEST_CASE("property: quantize is idempotent on its grid") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (const QFormat f : {q_signed(1, 15), q_signed(1, 5), q_signed(8, 5), q_unsigned(2, 4), q_unsigned(8, 12)}) {
        for (int i = 0; i < 2000; ++i) {
            const FixedValue a = quantize(u(gen), f);
            const FixedValue b = quantize(a.to_real(), f);
            CHECK(a.raw == b.raw);
        }
    }
}

TEST_CASE("property: quantize is monotone") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    for (const QFormat f : {q_signed(1, 15), q_signed(8, 5), q_unsigned(2, 4)}) {
        for (int i = 0; i < 5000; ++i) {
            double x = u(gen);
            double y = u(gen);
            if (x > y) {
                std::swap(x, y);
            }
            CHECK(quantize(x, f).raw <= quantize(y, f).raw);
        }
    }
}

TEST_CASE("cordic examples") {
    const QFormat in = kInputFormat;
    const QFormat mag = q_unsigned(2, 15);

    const PolarResult a = cordic_polar(quantize_iq(1.0, 0.0, in), mag);
    CHECK(a.magnitude.to_real() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(a.angle == doctest::Approx(0.0).epsilon(1e-4));

    const PolarResult b = cordic_polar(quantize_iq(0.0, 1.0, in), mag);
    CHECK(b.magnitude.to_real() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(b.angle - std::numbers::pi / 2) < 1e-4);

    const PolarResult c = cordic_polar(quantize_iq(-0.5, -0.5, in), mag);
    CHECK(std::abs(c.magnitude.to_real() - std::hypot(-0.5, -0.5)) < 1e-4);
    CHECK(std::abs(c.angle - std::atan2(-0.5, -0.5)) < 1e-4);
    CHECK(std::abs(c.angle - (-2.35619449019234)) < 1e-4);
}

TEST_CASE("cordic of zero is zero with angle zero") {
    const PolarResult z = cordic_polar(quantize_iq(0.0, 0.0, kInputFormat));
    CHECK(z.magnitude.raw == 0);
    CHECK(z.angle == 0.0);
}

TEST_CASE("cordic angle range is (-pi, pi]") {
    const PolarResult neg_axis = cordic_polar(quantize_iq(-0.5, 0.0, kInputFormat));
    // Within tolerance of pi, modulo the wrap.
    CHECK(std::abs(wrap_angle(neg_axis.angle - std::numbers::pi)) < 1e-4);
    CHECK(neg_axis.angle <= std::numbers::pi);
    CHECK(neg_axis.angle > -std::numbers::pi);
}

TEST_CASE("cordic rejects fewer than 8 iterations") {
    CHECK_THROWS_AS(cordic_polar(quantize_iq(0.1, 0.1, kInputFormat), 7), std::invalid_argument);
}

TEST_CASE("cordic gain compensation") {
    CHECK(1.0 / cordic_gain_compensation(16) == doctest::Approx(1.6467602581).epsilon(1e-9));
}

TEST_CASE("property: cordic against atan2/hypot over random Q1.15 inputs") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::int64_t> u(-32768, 32767);
    double max_angle_err = 0.0;
    double max_rel_mag_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        FixedIq z{{u(gen), kInputFormat}, {u(gen), kInputFormat}};
        if (z.re.raw == 0 && z.im.raw == 0) {
            continue;
        }
        const double re = z.re.to_real();
        const double im = z.im.to_real();
        const PolarResult p = cordic_polar(z, 16);
        max_angle_err = std::max(max_angle_err, std::abs(wrap_angle(p.angle - std::atan2(im, re))));
        const double m = std::hypot(re, im);
        max_rel_mag_err = std::max(max_rel_mag_err, std::abs(p.magnitude.to_real() - m) / m);
    }
    CHECK(max_angle_err <= std::ldexp(1.0, -14));
    CHECK(max_rel_mag_err <= std::ldexp(1.0, -13));
}

TEST_CASE("cordic error bounds scale with iterations") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int iters : {8, 12, 20}) {
        for (int i = 0; i < 2000; ++i) {
            const double re = u(gen);
            const double im = u(gen);
            const FixedIq z = quantize_iq(re, im, kInputFormat);
            const double qre = z.re.to_real();
            const double qim = z.im.to_real();
            const double m = std::hypot(qre, qim);
            if (m < 1e-3) {
                continue;
            }
            const PolarResult p = cordic_polar(z, iters);
            CHECK(std::abs(wrap_angle(p.angle - std::atan2(qim, qre))) <=
                  std::atan(std::ldexp(1.0, -(iters - 1))) + 1e-9);
            CHECK(std::abs(p.magnitude.to_real() - m) / m <= std::ldexp(1.0, -(iters - 2)));
        }
    }
}

TEST_CASE("wrap_angle") {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
    CHECK(wrap_angle(0.25) == 0.25);
}
