#include "ldacs/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldacs {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) {
        throw std::invalid_argument("uniform_int: empty range");
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(engine_());
    }
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(theta);
    have_spare_ = true;
    return radius * std::cos(theta);
}

std::complex<double> Rng::complex_normal(double variance) {
    const double sigma = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {sigma * re, sigma * im};
}

double Rng::exponential(double rate) {
    double u = uniform();
    while (u <= 0.0) {
        u = uniform();
    }
    return -std::log(u) / rate;
}

}  // namespace ldacs
