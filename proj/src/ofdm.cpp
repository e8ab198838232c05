#include "ldacs/ofdm.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ldacs {

namespace {

// FFTW planning is not thread-safe; execution on a finished plan is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        ComplexVector in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(out.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) {
            throw std::runtime_error("fftw: planning failed");
        }
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

ComplexVector execute(ComplexVector in, int sign) {
    ComplexVector out(in.size());
    fftw_plan plan = plan_cache().get(static_cast<int>(in.size()), sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

ComplexVector ofdm_body(const PhyParams& params, const SubcarrierLoading& loading) {
    const int n = params.N();
    ComplexVector spectrum(static_cast<std::size_t>(n));
    for (const auto& [k, value] : loading) {
        if (k <= -n / 2 || k >= n / 2) {
            throw std::invalid_argument("ofdm_body: subcarrier outside the FFT");
        }
        spectrum[static_cast<std::size_t>((k + n) % n)] = value;
    }
    ComplexVector body = execute(std::move(spectrum), FFTW_BACKWARD);
    double power = 0.0;
    for (const auto& s : body) {
        power += std::norm(s);
    }
    power /= static_cast<double>(n);
    if (power > 0.0) {
        const double scale = 1.0 / std::sqrt(power);
        for (auto& s : body) {
            s *= scale;
        }
    }
    return body;
}

ComplexVector forward_dft(std::span<const Complex> x) {
    return execute(ComplexVector(x.begin(), x.end()), FFTW_FORWARD);
}

ComplexVector add_cyclic_prefix(const ComplexVector& body, int cp_len) {
    const auto n = body.size();
    const auto cp = static_cast<std::size_t>(cp_len);
    if (cp > n) {
        throw std::invalid_argument("cyclic prefix longer than the body");
    }
    ComplexVector out;
    out.reserve(n + cp);
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cp), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Complex random_qpsk(Rng& rng) {
    const std::uint64_t bits = rng.next_u64();
    const double re = (bits & 1U) ? 1.0 : -1.0;
    const double im = (bits & 2U) ? 1.0 : -1.0;
    return Complex{re, im} * std::numbers::sqrt2 * 0.5;
}

std::vector<int> data_subcarriers() {
    std::vector<int> carriers;
    for (int k = -25; k <= 25; ++k) {
        if (k != 0) {
            carriers.push_back(k);
        }
    }
    return carriers;
}

ComplexVector random_payload_symbol(const PhyParams& params, Rng& rng) {
    SubcarrierLoading loading;
    for (int k : data_subcarriers()) {
        loading.emplace_back(k, random_qpsk(rng));
    }
    return add_cyclic_prefix(ofdm_body(params, loading), params.cp_len);
}

}  // namespace ldacs
