#pragma once

#include <vector>

#include "krg/nd_array.hpp"

namespace krg {

// Thin wrappers over the system FFT library. Both directions are
// unnormalized: forward applies e^{-i k x}, inverse applies e^{+i k x}, and
// inverse(forward(a)) == size(a) * a. Transforms are in place.
void fft_forward(NdArray<cplx>& a);
void fft_inverse(NdArray<cplx>& a);
void fft_forward_1d(std::vector<cplx>& a);

}  // namespace krg
