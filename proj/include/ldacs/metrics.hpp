#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ldacs/delay_line.hpp"
#include "ldacs/preamble.hpp"

namespace ldacs {

/// Metric values with n the newest sample index.
struct MetricSnapshot {
    std::int64_t n = 0;
    Complex ac1{};
    Complex ac2{};
    double ene = 0.0;
    double xcr = 0.0;
};

struct InstantProducts {
    Complex c1{};  ///< conj(r[n]) * r[n-L]
    Complex c2{};  ///< conj(r[n]) * r[n-2L]
    double ee = 0.0;  ///< |r[n]|^2
};

InstantProducts inst_products(Complex r_n, Complex r_n_minus_l, Complex r_n_minus_2l);

/// Sum of a[m] * history[m], history[m] being |c2| from m samples ago.
/// Requires history.size() >= D.
double xcr_reference(std::span<const double> c2_mag_history, const PreambleTemplate& tpl);

/// Windowed sums evaluated term by term. Samples before index 0 count as
/// zero for XCR; the AC/ENE windows need n >= 4L - 1 (std::out_of_range otherwise).
MetricSnapshot metrics_direct(std::span<const Complex> r, std::int64_t n, const PhyParams& params,
                              const PreambleTemplate& tpl);

/// Streaming state of the floating-point metrics: a received-sample line
/// reaching back 2L, product lines of depth 2L and a |c2| line of depth D.
class MetricState {
public:
    MetricState(const PhyParams& params, const PreambleTemplate& tpl);

    /// Sliding-window update: the newest product enters, the product from 2L
    /// samples ago leaves.
    MetricSnapshot step(Complex r_n);

    const MetricSnapshot& last() const { return last_; }

private:
    int l_;
    DelayLine<Complex> rx_;
    DelayLine<Complex> c1_line_;
    DelayLine<Complex> c2_line_;
    DelayLine<double> ee_line_;
    DelayLine<double> c2_mag_line_;
    std::vector<std::pair<std::size_t, double>> taps_;  // nonzero a[m]
    Complex ac1_{};
    Complex ac2_{};
    double ene_ = 0.0;
    MetricSnapshot last_{-1, {}, {}, 0.0, 0.0};
};

inline MetricSnapshot metrics_recursive_step(MetricState& state, Complex r_n) { return state.step(r_n); }

}  // namespace ldacs
