#pragma once

#include "mtm/grid_fields.hpp"

namespace mtm::detail {

/// Unnormalised forward DFT, X_k = sum_j x_j exp(-2 pi i jk/N).
void fft_forward(const CVec& in, CVec& out);
/// Normalised inverse DFT (includes the 1/N factor).
void fft_inverse(const CVec& in, CVec& out);

inline CVec fft_forward(const CVec& in) {
    CVec out(in.size());
    fft_forward(in, out);
    return out;
}

inline CVec fft_inverse(const CVec& in) {
    CVec out(in.size());
    fft_inverse(in, out);
    return out;
}

}  // namespace mtm::detail
