#include "ldacs/datapath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldacs {

namespace {

int tree_levels(std::size_t inputs) {
    int levels = 0;
    std::size_t n = inputs;
    while (n > 1) {
        n = (n + 1) / 2;
        ++levels;
    }
    return levels;
}

void check_template(const PreambleTemplate& tpl) {
    if (tpl.D <= 0 || tpl.a0.size() != static_cast<std::size_t>(tpl.D) ||
        tpl.a1.size() != static_cast<std::size_t>(tpl.D)) {
        throw std::invalid_argument("correlator: template bit planes missing");
    }
}

}  // namespace

void WordLengthConfig::validate() const {
    if (fa < 3 || fa > 15) {
        throw std::invalid_argument("WordLengthConfig: fa must be in [3, 15]");
    }
    if (fx < 2 || fx > 15) {
        throw std::invalid_argument("WordLengthConfig: fx must be in [2, 15]");
    }
}

FixedIq to_fixed_input(Complex r, double gain, SaturationCounter* counter) {
    Complex z = r * gain;
    const double mag = std::abs(z);
    if (mag > kFrontEndClip) {
        z *= kFrontEndClip / mag;
    }
    return quantize_iq(z.real(), z.imag(), kInputFormat, counter);
}

// ---------------------------------------------------------------------------
// Transpose form

TransposeCorrelator::TransposeCorrelator(const PreambleTemplate& tpl, int fx)
    : half_weights_(static_cast<std::size_t>(tpl.D)),
      registers_(static_cast<std::size_t>(tpl.D) + 1, 0),
      register_limit_((std::int64_t{1} << (8 + fx + 1)) - 1),
      output_format_(q_unsigned(8, fx)) {
    check_template(tpl);
    for (std::size_t m = 0; m < half_weights_.size(); ++m) {
        half_weights_[m] = static_cast<std::uint8_t>(2 * tpl.a0[m] + tpl.a1[m]);
    }
}

std::int64_t TransposeCorrelator::push(std::int64_t x) {
    // Half-LSB units: a = 1 contributes x << 1, a = 0.5 contributes x.
    auto tap = [x](std::uint8_t w) -> std::int64_t { return w == 2 ? (x << 1) : (w == 1 ? x : 0); };
    const std::size_t taps = half_weights_.size();
    const std::int64_t y = tap(half_weights_[0]) + registers_[1];
    for (std::size_t k = 1; k < taps; ++k) {
        std::int64_t v = tap(half_weights_[k]) + registers_[k + 1];
        if (v > register_limit_) {
            ++overflow_.events;
            v = register_limit_;
        }
        registers_[k] = v;
    }
    return saturate_raw(y >> 1, output_format_, &overflow_);
}

// ---------------------------------------------------------------------------
// Direct form

DirectCorrelator::DirectCorrelator(const PreambleTemplate& tpl, int fx)
    : fx_(fx), line_(static_cast<std::size_t>(std::max(tpl.D, 1))) {
    check_template(tpl);
    for (std::size_t m = 0; m < tpl.a0.size(); ++m) {
        if (tpl.a0[m] != 0) {
            taps_a0_.push_back(m);
        }
        if (tpl.a1[m] != 0) {
            taps_a1_.push_back(m);
        }
    }
    scratch_.reserve(std::max(taps_a0_.size(), taps_a1_.size()));
}

std::int64_t DirectCorrelator::tree_sum(const std::vector<std::size_t>& taps) {
    scratch_.clear();
    for (std::size_t m : taps) {
        scratch_.push_back(line_[m]);
    }
    int level = 0;
    while (scratch_.size() > 1) {
        ++level;
        const std::int64_t limit = (std::int64_t{1} << direct_adder_width(level, fx_)) - 1;
        std::size_t out = 0;
        for (std::size_t i = 0; i + 1 < scratch_.size(); i += 2) {
            std::int64_t s = scratch_[i] + scratch_[i + 1];
            if (s > limit) {
                ++overflow_.events;
                s = limit;
            }
            scratch_[out++] = s;
        }
        if (scratch_.size() % 2 == 1) {
            scratch_[out++] = scratch_.back();  // odd input passes to the next level
        }
        scratch_.resize(out);
    }
    return scratch_.empty() ? 0 : scratch_.front();
}

std::int64_t DirectCorrelator::push(std::int64_t x) {
    const std::int64_t word_limit = (std::int64_t{1} << (2 + fx_)) - 1;
    if (x < 0 || x > word_limit) {
        ++overflow_.events;
        x = std::clamp<std::int64_t>(x, 0, word_limit);
    }
    line_.push(x);
    const std::int64_t s0 = tree_sum(taps_a0_);
    const std::int64_t s1 = tree_sum(taps_a1_);
    return saturate_raw(s0 + (s1 >> 1), q_unsigned(8, fx_), &overflow_);
}

std::vector<FixedValue> xcr_transpose(std::span<const FixedValue> c2_mag, const PreambleTemplate& tpl) {
    std::vector<FixedValue> out;
    if (c2_mag.empty()) {
        return out;
    }
    const int fx = c2_mag.front().format.fraction_bits;
    const QFormat fmt = q_unsigned(8, fx);
    TransposeCorrelator corr(tpl, fx);
    out.reserve(c2_mag.size());
    for (const auto& v : c2_mag) {
        out.push_back(FixedValue{corr.push(v.raw), fmt});
    }
    return out;
}

std::vector<FixedValue> xcr_direct(std::span<const FixedValue> c2_mag, const PreambleTemplate& tpl) {
    std::vector<FixedValue> out;
    if (c2_mag.empty()) {
        return out;
    }
    const int fx = c2_mag.front().format.fraction_bits;
    const QFormat fmt = q_unsigned(8, fx);
    DirectCorrelator corr(tpl, fx);
    out.reserve(c2_mag.size());
    for (const auto& v : c2_mag) {
        out.push_back(FixedValue{corr.push(v.raw), fmt});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Datapath

MetricSnapshot FixedSnapshot::to_real() const {
    const double sa = std::ldexp(1.0, -fa);
    const double sx = std::ldexp(1.0, -fx);
    MetricSnapshot s;
    s.n = n;
    s.ac1 = Complex(static_cast<double>(ac1_re) * sa, static_cast<double>(ac1_im) * sa);
    s.ac2 = Complex(static_cast<double>(ac2_re) * sa, static_cast<double>(ac2_im) * sa);
    s.ene = static_cast<double>(ene) * sa;
    s.xcr = static_cast<double>(xcr) * sx;
    return s;
}

Datapath::Datapath(const PhyParams& params, const PreambleTemplate& tpl, const WordLengthConfig& words,
                   CorrelatorForm form, int cordic_iterations)
    : words_(words),
      form_(form),
      cordic_iterations_(cordic_iterations),
      l_(params.L()),
      rx_(static_cast<std::size_t>(2 * params.L() + 1)),
      c1_line_(static_cast<std::size_t>(2 * params.L())),
      c2_line_(static_cast<std::size_t>(2 * params.L())),
      ee_line_(static_cast<std::size_t>(2 * params.L())),
      transpose_(tpl, words.fx),
      direct_(tpl, words.fx) {
    words_.validate();
}

FixedSnapshot Datapath::step(const FixedIq& r_n) {
    if (!(r_n.re.format == kInputFormat) || !(r_n.im.format == kInputFormat)) {
        throw std::invalid_argument("Datapath: input must be Q1.15");
    }
    constexpr int in_frac = 15;
    const int prod_frac = 2 * in_frac;
    const QFormat prod_fmt = words_.product_format();
    const QFormat metric_fmt = words_.metric_format();

    rx_.push(Iq{r_n.re.raw, r_n.im.raw});
    const Iq& cur = rx_[0];
    const Iq& lag1 = rx_[static_cast<std::size_t>(l_)];
    const Iq& lag2 = rx_[static_cast<std::size_t>(2 * l_)];

    // conj(cur) * lag: re = a c + b d, im = a d - b c
    auto conj_mul = [&](const Iq& lag) {
        const std::int64_t re = cur.re * lag.re + cur.im * lag.im;
        const std::int64_t im = cur.re * lag.im - cur.im * lag.re;
        return Iq{requantize(re, prod_frac, prod_fmt, &saturation_).raw,
                  requantize(im, prod_frac, prod_fmt, &saturation_).raw};
    };
    const Iq c1 = conj_mul(lag1);
    const Iq c2 = conj_mul(lag2);
    const std::int64_t ee = requantize(cur.re * cur.re + cur.im * cur.im, prod_frac, prod_fmt, &saturation_).raw;

    // Three-input adders: register + newest - oldest.
    const Iq c1_old = c1_line_.push(c1);
    const Iq c2_old = c2_line_.push(c2);
    const std::int64_t ee_old = ee_line_.push(ee);
    ac1_.re = saturate_raw(ac1_.re + c1.re - c1_old.re, metric_fmt, &saturation_);
    ac1_.im = saturate_raw(ac1_.im + c1.im - c1_old.im, metric_fmt, &saturation_);
    ac2_.re = saturate_raw(ac2_.re + c2.re - c2_old.re, metric_fmt, &saturation_);
    ac2_.im = saturate_raw(ac2_.im + c2.im - c2_old.im, metric_fmt, &saturation_);
    ene_ = saturate_raw(ene_ + ee - ee_old, words_.energy_format(), &saturation_);

    // Phase translation blocks.
    const auto c2_polar =
        cordic_polar_raw(c2.re, c2.im, words_.fa, words_.c2_magnitude_format(), cordic_iterations_, &saturation_);
    const auto ac1_polar = cordic_polar_raw(ac1_.re, ac1_.im, words_.fa, words_.metric_magnitude_format(),
                                            cordic_iterations_, &saturation_);
    const auto ac2_polar = cordic_polar_raw(ac2_.re, ac2_.im, words_.fa, words_.metric_magnitude_format(),
                                            cordic_iterations_, &saturation_);

    const std::int64_t xcr =
        (form_ == CorrelatorForm::direct) ? direct_.push(c2_polar.magnitude.raw) : transpose_.push(c2_polar.magnitude.raw);

    FixedSnapshot s;
    s.n = ++n_;
    s.ac1_re = ac1_.re;
    s.ac1_im = ac1_.im;
    s.ac2_re = ac2_.re;
    s.ac2_im = ac2_.im;
    s.ene = ene_;
    s.ac1_mag = ac1_polar.magnitude.raw;
    s.ac2_mag = ac2_polar.magnitude.raw;
    s.ac1_angle = ac1_polar.angle;
    s.ac2_angle = ac2_polar.angle;
    s.c2_mag = c2_polar.magnitude.raw;
    s.xcr = xcr;
    s.fa = words_.fa;
    s.fx = words_.fx;
    return s;
}

std::uint64_t Datapath::saturation_events() const {
    return saturation_.events + transpose_.overflow_events() + direct_.overflow_events();
}

BitwidthReport bitwidth_report(const PreambleTemplate& tpl, const WordLengthConfig& cfg) {
    cfg.validate();
    check_template(tpl);
    BitwidthReport r;
    r.fx = cfg.fx;
    r.D = tpl.D;
    r.direct_delay_word_bits = 2 + cfg.fx;
    r.transpose_delay_word_bits = 8 + cfg.fx;
    r.direct_delay_storage_bits = static_cast<std::int64_t>(tpl.D) * r.direct_delay_word_bits;
    r.transpose_delay_storage_bits = static_cast<std::int64_t>(tpl.D) * r.transpose_delay_word_bits;
    for (std::size_t m = 0; m < tpl.a0.size(); ++m) {
        r.a0_taps += tpl.a0[m];
        r.a1_taps += tpl.a1[m];
    }
    for (int level = 1; level <= tree_levels(static_cast<std::size_t>(r.a0_taps)); ++level) {
        r.a0_adder_widths.push_back(direct_adder_width(level, cfg.fx));
    }
    for (int level = 1; level <= tree_levels(static_cast<std::size_t>(r.a1_taps)); ++level) {
        r.a1_adder_widths.push_back(direct_adder_width(level, cfg.fx));
    }
    r.output_bits = 8 + cfg.fx;
    if (r.direct_delay_storage_bits >= r.transpose_delay_storage_bits) {
        throw std::logic_error("bitwidth_report: direct form does not reduce delay storage");
    }
    return r;
}

}  // namespace ldacs
