#include "fsru/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "fsru/ops.hpp"

namespace fsru {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Detached per-line maximum used for the log-sum-exp shift; the shift is a
// constant, so gradients are unaffected.
Tensor detached_max(const Tensor& t, int axis) {
    const int rows = t.shape()[0], cols = t.shape()[1];
    if (axis == 1) {
        std::vector<double> m(rows);
        for (int i = 0; i < rows; ++i) {
            double mx = t.at({i, 0});
            for (int j = 1; j < cols; ++j) mx = std::max(mx, t.at({i, j}));
            m[i] = mx;
        }
        return Tensor({rows, 1}, std::move(m));
    }
    std::vector<double> m(cols);
    for (int j = 0; j < cols; ++j) {
        double mx = t.at({0, j});
        for (int i = 1; i < rows; ++i) mx = std::max(mx, t.at({i, j}));
        m[j] = mx;
    }
    return Tensor({1, cols}, std::move(m));
}

// log sum_j mask_j exp(x_j) along `axis`, keepdim, with max-shift.
Tensor masked_lse(const Tensor& logits, const Tensor& mask, int axis) {
    Tensor shift = detached_max(logits, axis);
    Tensor shifted = exp_op(sub(logits, shift));
    Tensor summed = sum_axis(mul(shifted, mask), axis);
    return add(log_op(summed), shift);
}

Tensor identity_matrix(int n) {
    std::vector<double> data(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) data[static_cast<std::size_t>(i) * n + i] = 1.0;
    return Tensor({n, n}, std::move(data));
}

}  // namespace

HeadParams HeadParams::init(int embed_dim, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(embed_dim));
    HeadParams p;
    p.text_fuse =
        Tensor::uniform({embed_dim, embed_dim}, -bound, bound, rng, true);
    p.image_fuse =
        Tensor::uniform({embed_dim, embed_dim}, -bound, bound, rng, true);
    p.cls_weight = Tensor::uniform({embed_dim, 2}, -bound, bound, rng, true);
    p.cls_bias = Tensor::zeros({1, 2}, true);
    return p;
}

std::vector<std::pair<std::string, Tensor>> HeadParams::named(
    const std::string& prefix) const {
    return {{prefix + ".text_fuse", text_fuse},
            {prefix + ".image_fuse", image_fuse},
            {prefix + ".cls_weight", cls_weight},
            {prefix + ".cls_bias", cls_bias}};
}

Tensor cosine_similarity_matrix(const Tensor& a, const Tensor& b) {
    auto normalize = [](const Tensor& t) {
        Tensor norm =
            sqrt_op(add_scalar(sum_axis(mul(t, t), 1), 1e-24));  // B x 1
        return div(t, norm);
    };
    return matmul_nt(normalize(a), normalize(b));
}

Tensor l_full(const BatchFeatures& batch, double temperature,
              bool literal_pairing, bool* degenerate) {
    const int b = batch.batch_size();
    if (degenerate) *degenerate = false;
    if (b < 2) {
        if (degenerate) *degenerate = true;
        return Tensor::scalar(0.0);
    }

    int rumor_count = 0;
    for (int y : batch.labels) rumor_count += (y == 1);
    const int nonrumor_count = b - rumor_count;

    // Positive-pair mask and per-anchor normalization (1/|R_class|).
    std::vector<double> pos(static_cast<std::size_t>(b) * b, 0.0);
    std::vector<double> anchor_w(static_cast<std::size_t>(b), 0.0);
    for (int i = 0; i < b; ++i) {
        const int yi = batch.labels[i];
        anchor_w[i] = 1.0 / std::max(1, yi == 1 ? rumor_count : nonrumor_count);
        for (int j = 0; j < b; ++j) {
            if (i == j) continue;
            const int yj = batch.labels[j];
            // Literal pairing points every anchor at class-1 partners, as the
            // summation indices of the loss are written; the default pairs
            // anchors within their own class.
            const bool positive = literal_pairing ? (yj == 1) : (yi == yj);
            if (positive) pos[static_cast<std::size_t>(i) * b + j] = 1.0;
        }
    }
    Tensor pos_mask({b, b}, std::move(pos));
    Tensor weights({b, 1}, std::move(anchor_w));
    Tensor offdiag = sub(Tensor::ones({b, b}), identity_matrix(b));

    auto modality_loss = [&](const Tensor& features) {
        Tensor logits = scale(cosine_similarity_matrix(features, features),
                              1.0 / temperature);
        Tensor lse = masked_lse(logits, offdiag, 1);        // B x 1
        Tensor pair_terms = sub(lse, logits);               // broadcast over columns
        return sum_all(mul(mul(pair_terms, pos_mask), weights));
    };

    return add(modality_loss(batch.text), modality_loss(batch.image));
}

Tensor l_self(const BatchFeatures& batch, double temperature,
              bool* degenerate) {
    const int b = batch.batch_size();
    if (degenerate) *degenerate = false;
    if (b < 2) {
        if (degenerate) *degenerate = true;
        return Tensor::scalar(0.0);
    }
    Tensor logits = scale(cosine_similarity_matrix(batch.text, batch.image),
                          1.0 / temperature);
    Tensor ones = Tensor::ones({b, b});
    Tensor row_lse = masked_lse(logits, ones, 1);  // text -> image direction
    Tensor col_lse = masked_lse(logits, ones, 0);  // image -> text direction
    Tensor diag_sum = sum_all(mul(logits, identity_matrix(b)));
    Tensor total = sub(add(sum_all(row_lse), sum_all(col_lse)),
                       scale(diag_sum, 2.0));
    return scale(total, 1.0 / (2.0 * b));
}

Tensor gamma(const Tensor& text, const Tensor& image) {
    Tensor q_text = softmax(text, 1);
    Tensor q_image = softmax(image, 1);
    Tensor mid = scale(add(q_text, q_image), 0.5);
    Tensor log_mid = log_op(mid);
    Tensor kl_text =
        sum_axis(mul(q_text, sub(log_op(q_text), log_mid)), 1);  // B x 1
    Tensor kl_image = sum_axis(mul(q_image, sub(log_op(q_image), log_mid)), 1);
    Tensor js = scale(add(kl_text, kl_image), 0.5);
    return clamp(scale(js, 1.0 / kLn2), 0.0, 1.0);
}

Tensor fuse(const Tensor& text, const Tensor& image, const Tensor& gamma_col,
            const HeadParams& params) {
    Tensor blended = add(matmul_nt(text, params.text_fuse),
                         matmul_nt(image, params.image_fuse));
    Tensor residual = add_scalar(neg(gamma_col), 1.0);  // 1 - gamma, B x 1
    return add(add(mul(residual, blended), mul(gamma_col, text)),
               mul(gamma_col, image));
}

Tensor classify(const Tensor& fused, const HeadParams& params) {
    return softmax(add(matmul(fused, params.cls_weight), params.cls_bias), 1);
}

Tensor cross_entropy(const Tensor& probabilities,
                     const std::vector<int>& labels) {
    const int b = probabilities.shape()[0];
    if (static_cast<int>(labels.size()) != b)
        throw std::invalid_argument("cross_entropy: label count mismatch");
    std::vector<double> one_hot(static_cast<std::size_t>(b) * 2, 0.0);
    for (int i = 0; i < b; ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw std::invalid_argument("cross_entropy: labels must be 0/1");
        one_hot[static_cast<std::size_t>(i) * 2 + labels[i]] = 1.0;
    }
    Tensor picked = sum_axis(mul(probabilities, Tensor({b, 2}, one_hot)), 1);
    return scale(sum_all(log_op(picked)), -1.0 / b);
}

TotalLoss total_loss(const Tensor& l_cls_term, const Tensor& l_full_term,
                     const Tensor& l_self_term, double mean_gamma,
                     double alpha, double beta) {
    TotalLoss out;
    out.value = add(add(l_cls_term, scale(l_full_term, alpha)),
                    scale(l_self_term, beta));
    out.report.l_cls = l_cls_term.item();
    out.report.l_full = l_full_term.item();
    out.report.l_self = l_self_term.item();
    out.report.total = out.value.item();
    out.report.mean_gamma = mean_gamma;
    out.report.alpha = alpha;
    out.report.beta = beta;
    return out;
}

}  // namespace fsru
