#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

// Pooled per-sample features for one mini-batch: token-axis means of the
// mixed text/image representations, plus the binary labels.
struct BatchFeatures {
    Tensor text;   // B x d
    Tensor image;  // B x d
    std::vector<int> labels;

    int batch_size() const { return static_cast<int>(labels.size()); }
};

struct LossReport {
    double l_cls = 0.0;
    double l_full = 0.0;
    double l_self = 0.0;
    double total = 0.0;
    double mean_gamma = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    bool degenerate_batch = false;  // batch too small for contrastive terms
};

struct HeadParams {
    Tensor text_fuse;   // d x d
    Tensor image_fuse;  // d x d
    Tensor cls_weight;  // d x 2
    Tensor cls_bias;    // 1 x 2

    static HeadParams init(int embed_dim, Rng& rng);
    std::vector<std::pair<std::string, Tensor>> named(
        const std::string& prefix) const;
};

// B x B matrix of cosine similarities between rows of a and rows of b.
Tensor cosine_similarity_matrix(const Tensor& a, const Tensor& b);

// Supervised intra-modal contrastive loss over both modalities. Positives
// are same-class pairs for both classes; `literal_pairing` switches the
// class-0 block to pairing class-0 anchors against class-1 samples instead.
// Batches smaller than 2 yield zero and set *degenerate.
Tensor l_full(const BatchFeatures& batch, double temperature,
              bool literal_pairing = false, bool* degenerate = nullptr);

// Symmetric InfoNCE between paired text/image rows with in-batch cross-modal
// negatives, averaged over both directions with the 1/(2B) factor.
Tensor l_self(const BatchFeatures& batch, double temperature,
              bool* degenerate = nullptr);

// Per-sample distribution-similarity weight: JS divergence between the
// softmaxed pooled vectors, normalized by ln 2 and clamped to [0, 1].
// Shape (B x 1).
Tensor gamma(const Tensor& text, const Tensor& image);

// m = (1 - g)(x_t W_t^T + x_v W_v^T) + g x_t + g x_v per sample.
Tensor fuse(const Tensor& text, const Tensor& image, const Tensor& gamma_col,
            const HeadParams& params);

// Row-stochastic class probabilities: softmax(m W + b), shape (B x 2).
Tensor classify(const Tensor& fused, const HeadParams& params);

// Mean binary cross-entropy of the probability rows against the labels.
Tensor cross_entropy(const Tensor& probabilities,
                     const std::vector<int>& labels);

struct TotalLoss {
    Tensor value;
    LossReport report;
};

// L = L_cls + alpha L_full + beta L_self, evaluated in that order.
TotalLoss total_loss(const Tensor& l_cls_term, const Tensor& l_full_term,
                     const Tensor& l_self_term, double mean_gamma,
                     double alpha, double beta);

}  // namespace fsru
