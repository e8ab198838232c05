#include "ldacs/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ldacs {

InstantProducts inst_products(Complex r_n, Complex r_n_minus_l, Complex r_n_minus_2l) {
    const Complex conj_n = std::conj(r_n);
    return InstantProducts{conj_n * r_n_minus_l, conj_n * r_n_minus_2l, std::norm(r_n)};
}

double xcr_reference(std::span<const double> c2_mag_history, const PreambleTemplate& tpl) {
    if (c2_mag_history.size() < static_cast<std::size_t>(tpl.D)) {
        throw std::invalid_argument("xcr_reference: history shorter than the template");
    }
    double sum = 0.0;
    for (int m = 0; m < tpl.D; ++m) {
        sum += c2_mag_history[static_cast<std::size_t>(m)] * tpl.a[static_cast<std::size_t>(m)];
    }
    return sum;
}

MetricSnapshot metrics_direct(std::span<const Complex> r, std::int64_t n, const PhyParams& params,
                              const PreambleTemplate& tpl) {
    const std::int64_t l = params.L();
    if (n < 4 * l - 1 || n >= static_cast<std::int64_t>(r.size())) {
        throw std::out_of_range("metrics_direct: insufficient history");
    }
    auto at = [&](std::int64_t k) { return r[static_cast<std::size_t>(k)]; };

    MetricSnapshot snap;
    snap.n = n;
    for (std::int64_t m = 0; m < 2 * l; ++m) {
        const std::int64_t k = n - m;
        const auto p = inst_products(at(k), at(k - l), at(k - 2 * l));
        snap.ac1 += p.c1;
        snap.ac2 += p.c2;
        snap.ene += p.ee;
    }
    for (std::int64_t m = 0; m < tpl.D; ++m) {
        const std::int64_t k = n - m;
        if (k - 2 * l < 0) {
            break;
        }
        const double w = tpl.a[static_cast<std::size_t>(m)];
        if (w != 0.0) {
            snap.xcr += w * std::abs(inst_products(at(k), at(k - l), at(k - 2 * l)).c2);
        }
    }
    return snap;
}

MetricState::MetricState(const PhyParams& params, const PreambleTemplate& tpl)
    : l_(params.L()),
      rx_(static_cast<std::size_t>(2 * params.L() + 1)),
      c1_line_(static_cast<std::size_t>(2 * params.L())),
      c2_line_(static_cast<std::size_t>(2 * params.L())),
      ee_line_(static_cast<std::size_t>(2 * params.L())),
      c2_mag_line_(static_cast<std::size_t>(tpl.D)) {
    if (tpl.D <= 0 || tpl.a.size() != static_cast<std::size_t>(tpl.D)) {
        throw std::invalid_argument("MetricState: template has no energy vector");
    }
    for (std::size_t m = 0; m < tpl.a.size(); ++m) {
        if (tpl.a[m] != 0.0) {
            taps_.emplace_back(m, tpl.a[m]);
        }
    }
}

MetricSnapshot MetricState::step(Complex r_n) {
    rx_.push(r_n);
    const auto p = inst_products(r_n, rx_[static_cast<std::size_t>(l_)], rx_[static_cast<std::size_t>(2 * l_)]);

    ac1_ += p.c1 - c1_line_.push(p.c1);
    ac2_ += p.c2 - c2_line_.push(p.c2);
    ene_ += p.ee - ee_line_.push(p.ee);

    MetricSnapshot snap;
    snap.n = last_.n + 1;
    snap.ac1 = ac1_;
    snap.ac2 = ac2_;
    snap.ene = ene_ > 0.0 ? ene_ : 0.0;  // cancellation can leave -0 residue

    c2_mag_line_.push(std::abs(p.c2));
    double xcr = 0.0;
    for (const auto& [m, w] : taps_) {
        xcr += w * c2_mag_line_[m];
    }
    snap.xcr = xcr;
    last_ = snap;
    return snap;
}

}  // namespace ldacs
