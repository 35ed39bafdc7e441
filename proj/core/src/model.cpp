#include "fsru/model.hpp"

#include <stdexcept>

#include "fsru/ops.hpp"

namespace fsru {

EmbeddingConfig ModelConfig::embedding_config() const {
    EmbeddingConfig cfg;
    cfg.vocab_size = vocab_size;
    cfg.embed_dim = embed_dim;
    cfg.text_len = text_len;
    cfg.grid_h = grid_h;
    cfg.grid_w = grid_w;
    cfg.patch_size = patch_size;
    return cfg;
}

SpectralConfig ModelConfig::spectral_config() const {
    SpectralConfig cfg;
    cfg.text_len = text_len;
    cfg.patch_count = patch_count();
    cfg.embed_dim = embed_dim;
    cfg.filter_count = filter_count;
    cfg.full_gate_conv = csc_full_conv;
    return cfg;
}

Model Model::init(const ModelConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    Model model;
    model.config = cfg;
    model.embedding = EmbeddingParams::init(cfg.embedding_config(), rng);
    if (cfg.mixer == MixerKind::spectral) {
        SpectralConfig scfg = cfg.spectral_config();
        SpectralBlockParams params = SpectralBlockParams::init(scfg, rng);
        if (!cfg.use_usc) {
            // The pass-through variant has no filter banks to train.
            params.text_bank = Tensor();
            params.image_bank = Tensor();
        }
        if (!cfg.use_csc) {
            params.text_select = Tensor();
            params.image_select = Tensor();
            params.text_gate_w = Tensor();
            params.text_gate_b = Tensor();
            params.image_gate_w = Tensor();
            params.image_gate_b = Tensor();
        }
        model.spectral = std::move(params);
    } else if (cfg.mixer == MixerKind::self_attention) {
        model.attention_text = AttentionParams::init(cfg.embed_dim, rng);
        model.attention_image = AttentionParams::init(cfg.embed_dim, rng);
    } else {
        model.mlp_text = SpatialMlpParams::init(cfg.text_len, rng);
        model.mlp_image = SpatialMlpParams::init(cfg.patch_count(), rng);
    }
    model.head = HeadParams::init(cfg.embed_dim, rng);
    return model;
}

std::vector<std::pair<std::string, Tensor>> Model::named_parameters() const {
    std::vector<std::pair<std::string, Tensor>> out =
        embedding.named("embedding");
    if (spectral) {
        for (auto& [name, tensor] : spectral->named("spectral"))
            if (tensor.defined()) out.emplace_back(name, tensor);
    }
    if (attention_text)
        for (auto& entry : attention_text->named("attention_text"))
            out.push_back(entry);
    if (attention_image)
        for (auto& entry : attention_image->named("attention_image"))
            out.push_back(entry);
    if (mlp_text)
        for (auto& entry : mlp_text->named("mlp_text")) out.push_back(entry);
    if (mlp_image)
        for (auto& entry : mlp_image->named("mlp_image")) out.push_back(entry);
    for (auto& entry : head.named("head")) out.push_back(entry);
    return out;
}

std::vector<Tensor> Model::parameters() const {
    std::vector<Tensor> out;
    for (auto& [name, tensor] : named_parameters()) out.push_back(tensor);
    return out;
}

std::pair<Tensor, Tensor> Model::mix(const Tensor& text_embedding,
                                     const Tensor& image_embedding) const {
    switch (config.mixer) {
        case MixerKind::spectral: {
            SpectralBlockOptions opts;
            opts.use_usc = config.use_usc;
            opts.use_csc = config.use_csc;
            return spectral_block(text_embedding, image_embedding, *spectral,
                                  opts);
        }
        case MixerKind::self_attention:
            return {self_attention(text_embedding, *attention_text),
                    self_attention(image_embedding, *attention_image)};
        case MixerKind::spatial_mlp:
        default:
            return {spatial_mlp(text_embedding, *mlp_text),
                    spatial_mlp(image_embedding, *mlp_image)};
    }
}

Model::BatchResult Model::forward(const std::vector<Sample>& batch) const {
    if (batch.empty()) throw std::invalid_argument("forward: empty batch");
    const EmbeddingConfig ecfg = config.embedding_config();

    std::vector<Tensor> text_rows, image_rows;
    std::vector<int> labels;
    text_rows.reserve(batch.size());
    image_rows.reserve(batch.size());
    labels.reserve(batch.size());
    for (const Sample& sample : batch) {
        Tensor text_emb = embed_text(sample.text, embedding, ecfg);
        Tensor image_emb = embed_image(sample.image, embedding, ecfg);
        auto [text_mixed, image_mixed] = mix(text_emb, image_emb);
        text_rows.push_back(mean_axis(text_mixed, 0));
        image_rows.push_back(mean_axis(image_mixed, 0));
        labels.push_back(sample.label);
    }

    BatchResult result;
    result.features.text = stack_rows(text_rows);
    result.features.image = stack_rows(image_rows);
    result.features.labels = labels;

    const int b = static_cast<int>(batch.size());
    Tensor gamma_col;
    double mean_gamma = 0.5;
    if (config.use_dsf) {
        gamma_col = gamma(result.features.text, result.features.image);
        double acc = 0.0;
        for (double v : gamma_col.data()) acc += v;
        mean_gamma = acc / b;
    } else {
        gamma_col = Tensor::full({b, 1}, 0.5);
    }

    result.fused =
        fuse(result.features.text, result.features.image, gamma_col, head);
    result.probabilities = classify(result.fused, head);

    result.predictions.resize(b);
    for (int i = 0; i < b; ++i)
        result.predictions[i] =
            result.probabilities.at({i, 1}) > result.probabilities.at({i, 0})
                ? 1
                : 0;

    Tensor cls_term = cross_entropy(result.probabilities, labels);
    Tensor full_term = Tensor::scalar(0.0);
    Tensor self_term = Tensor::scalar(0.0);
    bool degenerate = false;
    double alpha = 0.0, beta = 0.0;
    if (config.use_cl) {
        alpha = config.alpha;
        beta = config.beta;
        bool degenerate_full = false, degenerate_self = false;
        full_term = l_full(result.features, config.temperature,
                           config.literal_supervised_pairs, &degenerate_full);
        self_term =
            l_self(result.features, config.temperature, &degenerate_self);
        degenerate = degenerate_full || degenerate_self;
    }
    TotalLoss total =
        total_loss(cls_term, full_term, self_term, mean_gamma, alpha, beta);
    total.report.degenerate_batch = degenerate;
    result.loss = total.value;
    result.report = total.report;
    return result;
}

}  // namespace fsru
