#pragma once

#include <cstddef>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

namespace fft {

bool is_power_of_two(std::size_t n);

// In-place unnormalized transform of a single line; sign -1 is the forward
// DFT, +1 the inverse kernel (without the 1/L factor). Power-of-two lengths
// use the iterative radix-2 FFT with bit-reversal; anything else falls back
// to the direct O(L^2) summation.
void transform_line(double* re, double* im, std::size_t length, int sign);

// Transforms every 1-D line along `axis` of a rank <= 3 row-major array.
// `scale` multiplies each output bin (1/L for the inverse transform).
void transform_axis(const double* re_in, const double* im_in, double* re_out,
                    double* im_out, const std::vector<int>& shape, int axis,
                    int sign, double scale);

}  // namespace fft

// X[k] = sum_i x[i] e^{-j 2 pi k i / L} per line along `axis`. Differentiable;
// the backward pass is the conjugate-transposed (sign-flipped) transform.
ComplexTensor dft_1d(const ComplexTensor& x, int axis);

// Inverse transform carrying the 1/L normalization, so that
// idft_1d(dft_1d(x)) == x.
ComplexTensor idft_1d(const ComplexTensor& x, int axis);

}  // namespace fsru
