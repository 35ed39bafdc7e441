#include "fsru/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "fsru/fft.hpp"
#include "fsru/ops.hpp"

namespace fsru {

namespace {
constexpr double kPi = 3.14159265358979323846;

Tensor near_ones(std::vector<int> shape, Rng& rng) {
    Tensor t = Tensor::uniform(std::move(shape), -0.01, 0.01, rng, true);
    for (double& v : t.mutable_data()) v += 1.0;
    return t;
}
}  // namespace

SpectralBlockParams SpectralBlockParams::init(const SpectralConfig& cfg,
                                              Rng& rng) {
    if (cfg.filter_count < 1)
        throw std::invalid_argument("empty filter bank");
    SpectralBlockParams p;
    p.full_gate_conv = cfg.full_gate_conv;
    p.text_bank =
        near_ones({cfg.filter_count, cfg.text_len, cfg.embed_dim}, rng);
    p.image_bank =
        near_ones({cfg.filter_count, cfg.patch_count, cfg.embed_dim}, rng);
    p.text_select = near_ones({cfg.text_len, cfg.embed_dim}, rng);
    p.image_select = near_ones({cfg.patch_count, cfg.embed_dim}, rng);
    if (cfg.full_gate_conv) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
        p.text_gate_w = Tensor::uniform({cfg.embed_dim, cfg.embed_dim}, -bound,
                                        bound, rng, true);
        p.image_gate_w = Tensor::uniform({cfg.embed_dim, cfg.embed_dim},
                                         -bound, bound, rng, true);
    } else {
        p.text_gate_w = Tensor::ones({cfg.embed_dim}, true);
        p.image_gate_w = Tensor::ones({cfg.embed_dim}, true);
    }
    p.text_gate_b = Tensor::ones({cfg.embed_dim}, true);
    p.image_gate_b = Tensor::ones({cfg.embed_dim}, true);
    return p;
}

std::vector<std::pair<std::string, Tensor>> SpectralBlockParams::named(
    const std::string& prefix) const {
    return {{prefix + ".text_bank", text_bank},
            {prefix + ".image_bank", image_bank},
            {prefix + ".text_select", text_select},
            {prefix + ".image_select", image_select},
            {prefix + ".text_gate_w", text_gate_w},
            {prefix + ".text_gate_b", text_gate_b},
            {prefix + ".image_gate_w", image_gate_w},
            {prefix + ".image_gate_b", image_gate_b}};
}

std::vector<double> usc_cosine_weights(int filter_count) {
    if (filter_count < 1) throw std::invalid_argument("empty filter bank");
    std::vector<double> w(filter_count);
    for (int i = 1; i <= filter_count; ++i)
        w[i - 1] =
            std::cos((2.0 * i - 1.0) * kPi / (2.0 * filter_count));
    return w;
}

ComplexTensor spectrum(const Tensor& x, int axis) {
    return dft_1d(complex_from_real(x), axis);
}

Tensor usc(const ComplexTensor& x, const Tensor& bank, int length) {
    if (bank.rank() != 3)
        throw std::invalid_argument("usc: bank must be rank 3 (k x L x d)");
    const int filter_count = bank.shape()[0];
    if (filter_count < 1) throw std::invalid_argument("empty filter bank");
    if (bank.shape()[1] != x.re.shape()[0] ||
        bank.shape()[2] != x.re.shape()[1])
        throw std::invalid_argument("usc: bank shape " +
                                    shape_str(bank.shape()) +
                                    " does not match spectrum " +
                                    shape_str(x.re.shape()));
    const std::vector<double> weights = usc_cosine_weights(filter_count);
    Tensor power = abs_sq(x);
    Tensor acc;
    for (int i = 0; i < filter_count; ++i) {
        Tensor term = scale(mul(power, slice_plane(bank, i)),
                            weights[i] / static_cast<double>(length));
        acc = i == 0 ? term : add(acc, term);
    }
    return acc;
}

namespace {

Tensor gate_from(const Tensor& other_hat, const Tensor& select,
                 const Tensor& gate_w, const Tensor& gate_b,
                 bool full_gate_conv) {
    Tensor pooled = mean_axis(mul(other_hat, select), 0);  // 1 x d
    if (full_gate_conv) {
        Tensor lin = matmul(pooled, gate_w);
        return conv1x1(lin, Tensor::ones({gate_b.shape()[0]}), gate_b);
    }
    return conv1x1(pooled, gate_w, gate_b);
}

}  // namespace

std::pair<Tensor, Tensor> csc(const Tensor& text_hat, const Tensor& image_hat,
                              const SpectralBlockParams& params) {
    Tensor text_gate =
        gate_from(image_hat, params.image_select, params.text_gate_w,
                  params.text_gate_b, params.full_gate_conv);
    Tensor image_gate =
        gate_from(text_hat, params.text_select, params.image_gate_w,
                  params.image_gate_b, params.full_gate_conv);
    return {mul(text_hat, text_gate), mul(image_hat, image_gate)};
}

namespace {

Tensor compress(const ComplexTensor& spec, const Tensor& bank, int length,
                bool use_usc) {
    if (use_usc) return usc(spec, bank, length);
    return scale(abs_sq(spec), 1.0 / static_cast<double>(length));
}

}  // namespace

std::pair<Tensor, Tensor> spectral_block(const Tensor& x_text,
                                         const Tensor& x_image,
                                         const SpectralBlockParams& params,
                                         const SpectralBlockOptions& opts) {
    const int text_len = x_text.shape()[0];
    const int patch_count = x_image.shape()[0];
    ComplexTensor text_spec = spectrum(x_text, 0);
    ComplexTensor image_spec = spectrum(x_image, 0);
    Tensor text_hat = compress(text_spec, params.text_bank, text_len,
                               opts.use_usc);
    Tensor image_hat = compress(image_spec, params.image_bank, patch_count,
                                opts.use_usc);
    Tensor text_sel = text_hat, image_sel = image_hat;
    if (opts.use_csc) {
        auto gated = csc(text_hat, image_hat, params);
        text_sel = gated.first;
        image_sel = gated.second;
    }
    ComplexTensor text_out = idft_1d(complex_from_real(text_sel), 0);
    ComplexTensor image_out = idft_1d(complex_from_real(image_sel), 0);
    return {text_out.re, image_out.re};
}

}  // namespace fsru
