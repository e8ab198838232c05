#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ldacs {

/// Seeded generator with platform-independent draws.
///
/// std::*_distribution output differs between standard libraries, so the
/// uniform/normal transforms are written out on top of mt19937_64, whose
/// sequence is fixed by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal (Box-Muller, both outputs used).
    double normal();

    /// Circular complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ldacs
