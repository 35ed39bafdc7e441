#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsru/embedding.hpp"
#include "fsru/mixers.hpp"
#include "fsru/objectives.hpp"
#include "fsru/spectral.hpp"
#include "fsru/tensor.hpp"

namespace fsru {

struct Sample {
    int label = 0;
    TextSample text;
    ImageSample image;
};

struct ModelConfig {
    int vocab_size = 64;
    int embed_dim = 32;
    int text_len = 32;
    int grid_h = 4;
    int grid_w = 4;
    int patch_size = 4;
    int filter_count = 2;
    MixerKind mixer = MixerKind::spectral;
    bool use_usc = true;
    bool use_csc = true;
    bool use_dsf = true;  // false: gamma fixed at 0.5
    bool use_cl = true;   // false: alpha = beta = 0, contrastive terms skipped
    bool csc_full_conv = false;
    bool literal_supervised_pairs = false;
    double temperature = 0.1;
    double alpha = 0.2;
    double beta = 0.2;

    int patch_count() const { return grid_h * grid_w; }
    EmbeddingConfig embedding_config() const;
    SpectralConfig spectral_config() const;
};

// The end-to-end network: embeddings, the token-mixing stage selected by
// `mixer`, pooled fusion, and the classification head. Which parameter sets
// exist depends on the configuration (ablations drop the matching pieces).
struct Model {
    ModelConfig config;
    EmbeddingParams embedding;
    std::optional<SpectralBlockParams> spectral;
    std::optional<AttentionParams> attention_text, attention_image;
    std::optional<SpatialMlpParams> mlp_text, mlp_image;
    HeadParams head;

    static Model init(const ModelConfig& cfg, std::uint64_t seed);

    std::vector<std::pair<std::string, Tensor>> named_parameters() const;
    std::vector<Tensor> parameters() const;

    struct BatchResult {
        Tensor loss;
        LossReport report;
        std::vector<int> predictions;
        BatchFeatures features;  // pooled per-sample vectors
        Tensor fused;            // B x d
        Tensor probabilities;    // B x 2
    };

    // Runs the batch end to end; records on the active graph if any.
    BatchResult forward(const std::vector<Sample>& batch) const;

    // Token mixing for one sample pair; exposed for the spectrum dump.
    std::pair<Tensor, Tensor> mix(const Tensor& text_embedding,
                                  const Tensor& image_embedding) const;
};

}  // namespace fsru
