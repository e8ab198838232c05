#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ldacs/preamble.hpp"
#include "ldacs/rng.hpp"

namespace ldacs {

/// (subcarrier index on the base grid, value); negative indices wrap.
using SubcarrierLoading = std::vector<std::pair<int, Complex>>;

/// Inverse DFT of length N from a sparse subcarrier loading, scaled to unit
/// mean sample power. Backed by FFTW.
ComplexVector ofdm_body(const PhyParams& params, const SubcarrierLoading& loading);

/// Forward DFT (unnormalized) of an arbitrary-length sequence.
ComplexVector forward_dft(std::span<const Complex> x);

/// Prepend the last cp_len samples of the body.
ComplexVector add_cyclic_prefix(const ComplexVector& body, int cp_len);

/// Unit-magnitude QPSK symbol drawn from two random bits.
Complex random_qpsk(Rng& rng);

/// Data subcarriers on the base grid: -25..25 without DC.
std::vector<int> data_subcarriers();

/// One OFDM data symbol with cyclic prefix, random QPSK on every data
/// subcarrier, unit mean power.
ComplexVector random_payload_symbol(const PhyParams& params, Rng& rng);

}  // namespace ldacs
