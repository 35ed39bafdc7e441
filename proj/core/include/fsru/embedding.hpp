#pragma once

#include <cstdint>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

// Token-id sequence padded to a fixed length; mask marks real positions.
struct TextSample {
    std::vector<int> token_ids;
    std::vector<std::uint8_t> mask;
};

// Non-overlapping patch grid; pixels holds (grid_h*grid_w) rows of
// patch_size^2 values in [0, 1], row-major.
struct ImageSample {
    int grid_h = 0;
    int grid_w = 0;
    int patch_size = 0;
    std::vector<double> pixels;

    int patch_count() const { return grid_h * grid_w; }
};

struct EmbeddingConfig {
    int vocab_size = 64;
    int embed_dim = 32;
    int text_len = 32;
    int grid_h = 4;
    int grid_w = 4;
    int patch_size = 4;

    int patch_count() const { return grid_h * grid_w; }
    int patch_pixels() const { return patch_size * patch_size; }
};

struct EmbeddingParams {
    Tensor word_table;   // vocab x d
    Tensor patch_proj;   // p^2 x d
    Tensor conv_prev;    // d x d, weight for the left neighbor patch
    Tensor conv_center;  // d x d
    Tensor conv_next;    // d x d
    Tensor conv_bias;    // 1 x d

    static EmbeddingParams init(const EmbeddingConfig& cfg, Rng& rng);
    std::vector<std::pair<std::string, Tensor>> named(
        const std::string& prefix) const;
};

// Fixed sinusoidal position code; row 0 is [0, 1, 0, 1, ...].
Tensor sinusoidal_positions(int length, int dim);

// Rows are table[id] + position_code, zero at padded positions.
Tensor embed_text(const TextSample& sample, const EmbeddingParams& params,
                  const EmbeddingConfig& cfg);

// Linear patch projection, width-3 circular convolution along the patch
// sequence, then relu.
Tensor embed_image(const ImageSample& sample, const EmbeddingParams& params,
                   const EmbeddingConfig& cfg);

}  // namespace fsru
