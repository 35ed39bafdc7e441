#include "fsru/embedding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fsru/ops.hpp"

namespace fsru {

EmbeddingParams EmbeddingParams::init(const EmbeddingConfig& cfg, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    EmbeddingParams p;
    p.word_table = Tensor::uniform({cfg.vocab_size, cfg.embed_dim}, -bound,
                                   bound, rng, true);
    p.patch_proj = Tensor::uniform({cfg.patch_pixels(), cfg.embed_dim}, -bound,
                                   bound, rng, true);
    p.conv_prev = Tensor::uniform({cfg.embed_dim, cfg.embed_dim}, -bound,
                                  bound, rng, true);
    p.conv_center = Tensor::uniform({cfg.embed_dim, cfg.embed_dim}, -bound,
                                    bound, rng, true);
    p.conv_next = Tensor::uniform({cfg.embed_dim, cfg.embed_dim}, -bound,
                                  bound, rng, true);
    p.conv_bias = Tensor::zeros({1, cfg.embed_dim}, true);
    return p;
}

std::vector<std::pair<std::string, Tensor>> EmbeddingParams::named(
    const std::string& prefix) const {
    return {{prefix + ".word_table", word_table},
            {prefix + ".patch_proj", patch_proj},
            {prefix + ".conv_prev", conv_prev},
            {prefix + ".conv_center", conv_center},
            {prefix + ".conv_next", conv_next},
            {prefix + ".conv_bias", conv_bias}};
}

Tensor sinusoidal_positions(int length, int dim) {
    std::vector<double> data(static_cast<std::size_t>(length) * dim);
    for (int pos = 0; pos < length; ++pos) {
        for (int c = 0; c < dim; ++c) {
            const int pair = c / 2;
            const double rate =
                std::pow(10000.0, -2.0 * pair / static_cast<double>(dim));
            const double angle = pos * rate;
            data[static_cast<std::size_t>(pos) * dim + c] =
                (c % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return Tensor({length, dim}, std::move(data));
}

Tensor embed_text(const TextSample& sample, const EmbeddingParams& params,
                  const EmbeddingConfig& cfg) {
    if (static_cast<int>(sample.token_ids.size()) > cfg.text_len)
        throw std::invalid_argument("embed_text: sample longer than text_len");
    std::vector<int> ids(cfg.text_len, 0);
    std::vector<std::uint8_t> mask(cfg.text_len, 0);
    for (std::size_t i = 0; i < sample.token_ids.size(); ++i) {
        ids[i] = sample.token_ids[i];
        mask[i] = i < sample.mask.size() ? sample.mask[i] : 1;
    }
    Tensor looked_up = embedding_lookup(params.word_table, ids, mask);

    // Position code masked to zero at padded rows, added as a constant.
    Tensor positions = sinusoidal_positions(cfg.text_len, cfg.embed_dim);
    std::vector<double> masked(positions.data().begin(),
                               positions.data().end());
    for (int i = 0; i < cfg.text_len; ++i)
        if (!mask[i])
            std::fill(masked.begin() + static_cast<std::size_t>(i) *
                                           cfg.embed_dim,
                      masked.begin() +
                          static_cast<std::size_t>(i + 1) * cfg.embed_dim,
                      0.0);
    Tensor masked_positions({cfg.text_len, cfg.embed_dim}, std::move(masked));
    return add(looked_up, masked_positions);
}

Tensor embed_image(const ImageSample& sample, const EmbeddingParams& params,
                   const EmbeddingConfig& cfg) {
    if (sample.grid_h != cfg.grid_h || sample.grid_w != cfg.grid_w)
        throw std::invalid_argument("embed_image: patch grid mismatch, got " +
                                    std::to_string(sample.grid_h) + "x" +
                                    std::to_string(sample.grid_w));
    if (sample.patch_size != cfg.patch_size)
        throw std::invalid_argument("embed_image: wrong patch size " +
                                    std::to_string(sample.patch_size));
    const int n = cfg.patch_count();
    const int pp = cfg.patch_pixels();
    if (static_cast<int>(sample.pixels.size()) != n * pp)
        throw std::invalid_argument("embed_image: pixel buffer length mismatch");

    Tensor patches({n, pp}, sample.pixels);
    Tensor projected = matmul(patches, params.patch_proj);
    // y[i] = x[i-1] W_prev + x[i] W_center + x[i+1] W_next + bias (circular)
    Tensor mixed = add(
        add(matmul(rotate_rows(projected, -1), params.conv_prev),
            matmul(projected, params.conv_center)),
        matmul(rotate_rows(projected, +1), params.conv_next));
    return relu(add(mixed, params.conv_bias));
}

}  // namespace fsru
