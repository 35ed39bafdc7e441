#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

struct SpectralConfig {
    int text_len = 32;     // token-axis length of the text branch
    int patch_count = 16;  // token-axis length of the image branch
    int embed_dim = 32;
    int filter_count = 2;
    bool full_gate_conv = false;  // 1x1 gate conv as dense d x d instead of
                                  // the default per-channel map
};

struct SpectralBlockParams {
    Tensor text_bank;     // k x m x d
    Tensor image_bank;    // k x n x d
    Tensor text_select;   // m x d
    Tensor image_select;  // n x d
    // Gate convs, one per direction: text_gate_* produces the filter applied
    // to the text spectrum (from the pooled image spectrum) and vice versa.
    Tensor text_gate_w;   // {d} or d x d when full_gate_conv
    Tensor text_gate_b;   // {d}
    Tensor image_gate_w;
    Tensor image_gate_b;
    bool full_gate_conv = false;

    static SpectralBlockParams init(const SpectralConfig& cfg, Rng& rng);
    std::vector<std::pair<std::string, Tensor>> named(
        const std::string& prefix) const;
};

// cos((2i-1)pi/(2k)) for i = 1..k; sums to zero for every k >= 1.
std::vector<double> usc_cosine_weights(int filter_count);

// Per-channel DFT along the token axis of a real (L x d) input.
ComplexTensor spectrum(const Tensor& x, int axis = 0);

// Cosine-weighted filter-bank compression of the power spectrum:
// sum_i (1/l) |X|^2 * bank[i] * cos((2i-1)pi/(2k)), real (L x d) output.
// `length` is the token-axis extent of the modality.
Tensor usc(const ComplexTensor& x, const Tensor& bank, int length);

// Cross-modal co-selection: each modality's compressed spectrum is gated by
// a 1 x d filter derived from the other modality (pool over tokens, then the
// 1x1 conv), broadcast over its own token axis.
std::pair<Tensor, Tensor> csc(const Tensor& text_hat, const Tensor& image_hat,
                              const SpectralBlockParams& params);

struct SpectralBlockOptions {
    bool use_usc = true;  // false: replace the bank with the |X|^2 / l pass-through
    bool use_csc = true;  // false: skip the cross-modal gate
};

// DFT -> USC -> CSC -> IDFT (real part); output shapes match the inputs.
std::pair<Tensor, Tensor> spectral_block(const Tensor& x_text,
                                         const Tensor& x_image,
                                         const SpectralBlockParams& params,
                                         const SpectralBlockOptions& opts = {});

}  // namespace fsru
