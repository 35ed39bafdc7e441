#include "fsru/mixers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fsru/fft.hpp"
#include "fsru/ops.hpp"

namespace fsru {

std::string to_string(MixerKind kind) {
    switch (kind) {
        case MixerKind::spectral: return "spectral";
        case MixerKind::self_attention: return "self_attention";
        case MixerKind::spatial_mlp: return "spatial_mlp";
    }
    return "unknown";
}

MixerKind parse_mixer(const std::string& name) {
    if (name == "spectral") return MixerKind::spectral;
    if (name == "self_attention" || name == "attention")
        return MixerKind::self_attention;
    if (name == "spatial_mlp" || name == "mlp") return MixerKind::spatial_mlp;
    throw std::invalid_argument("unknown mixer kind: " + name);
}

AttentionParams AttentionParams::init(int embed_dim, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(embed_dim));
    AttentionParams p;
    p.query = Tensor::uniform({embed_dim, embed_dim}, -bound, bound, rng, true);
    p.key = Tensor::uniform({embed_dim, embed_dim}, -bound, bound, rng, true);
    p.value = Tensor::uniform({embed_dim, embed_dim}, -bound, bound, rng, true);
    return p;
}

std::vector<std::pair<std::string, Tensor>> AttentionParams::named(
    const std::string& prefix) const {
    return {{prefix + ".query", query},
            {prefix + ".key", key},
            {prefix + ".value", value}};
}

Tensor self_attention(const Tensor& x, const AttentionParams& params) {
    const int d = x.shape()[1];
    Tensor q = matmul(x, params.query);
    Tensor k = matmul(x, params.key);
    Tensor v = matmul(x, params.value);
    Tensor scores =
        softmax(scale(matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(d))),
                1);
    return matmul(scores, v);
}

SpatialMlpParams SpatialMlpParams::init(int seq_len, Rng& rng) {
    SpatialMlpParams p;
    p.mix = Tensor::uniform({seq_len, seq_len}, -0.01, 0.01, rng, true);
    for (int i = 0; i < seq_len; ++i)
        p.mix.mutable_data()[static_cast<std::size_t>(i) * seq_len + i] += 1.0;
    return p;
}

std::vector<std::pair<std::string, Tensor>> SpatialMlpParams::named(
    const std::string& prefix) const {
    return {{prefix + ".mix", mix}};
}

Tensor spatial_mlp(const Tensor& x, const SpatialMlpParams& params) {
    return matmul(params.mix, x);
}

SpectralMixerParams SpectralMixerParams::init(int seq_len, int embed_dim,
                                              int filter_count, Rng& rng) {
    SpectralConfig cfg;
    cfg.text_len = seq_len;
    cfg.patch_count = seq_len;
    cfg.embed_dim = embed_dim;
    cfg.filter_count = filter_count;
    SpectralBlockParams full = SpectralBlockParams::init(cfg, rng);
    return SpectralMixerParams{full.text_bank, full.text_select,
                               full.text_gate_w, full.text_gate_b};
}

Tensor spectral_mixer(const Tensor& x, const SpectralMixerParams& params) {
    const int seq_len = x.shape()[0];
    ComplexTensor spec = spectrum(x, 0);
    Tensor compressed = usc(spec, params.bank, seq_len);
    Tensor gate = conv1x1(mean_axis(mul(compressed, params.select), 0),
                          params.gate_w, params.gate_b);
    Tensor selected = mul(compressed, gate);
    return idft_1d(complex_from_real(selected), 0).re;
}

std::pair<Tensor, Tensor> circular_conv_equivalence(const Tensor& x,
                                                    const Tensor& kernel) {
    if (x.shape() != kernel.shape())
        throw std::invalid_argument(
            "circular_conv_equivalence: shape mismatch");
    const int len = x.shape()[0], d = x.shape()[1];

    // Direct O(L^2) circular convolution per channel.
    std::vector<double> direct(x.numel(), 0.0);
    const double* xd = x.data().data();
    const double* kd = kernel.data().data();
    for (int i = 0; i < len; ++i)
        for (int s = 0; s < len; ++s) {
            const int shift = ((i - s) % len + len) % len;
            for (int c = 0; c < d; ++c)
                direct[static_cast<std::size_t>(i) * d + c] +=
                    xd[static_cast<std::size_t>(s) * d + c] *
                    kd[static_cast<std::size_t>(shift) * d + c];
        }

    ComplexTensor product =
        complex_mul(dft_1d(complex_from_real(kernel), 0),
                    dft_1d(complex_from_real(x), 0));
    Tensor via_fft = idft_1d(product, 0).re;
    return {Tensor(x.shape(), std::move(direct)), via_fft};
}

double flops(MixerKind kind, long seq_len, long embed_dim,
             FlopsColumn column) {
    const double L = static_cast<double>(seq_len);
    const double d = static_cast<double>(embed_dim);
    switch (kind) {
        case MixerKind::spatial_mlp:
            return L * L * d;
        case MixerKind::self_attention:
            return L * d * d + L * L * d;
        case MixerKind::spectral:
            if (column == FlopsColumn::image)
                return L * d * std::log2(L) + (L + d) * d;
            return L * d * std::log2(L) + (L * std::log2(d) + d) * d;
    }
    return 0.0;
}

std::vector<BenchRecord> bench(const std::vector<MixerKind>& kinds,
                               const std::vector<std::pair<int, int>>& sizes,
                               int repeats, int warmup, std::uint64_t seed) {
    if (repeats < 1) repeats = 1;
    using clock = std::chrono::steady_clock;
    std::vector<BenchRecord> records;
    for (const auto& [seq_len, embed_dim] : sizes) {
        for (MixerKind kind : kinds) {
            Rng rng(seed);
            Tensor input =
                Tensor::uniform({seq_len, embed_dim}, -1.0, 1.0, rng);
            AttentionParams attn;
            SpatialMlpParams mlp;
            SpectralMixerParams spec;
            switch (kind) {
                case MixerKind::self_attention:
                    attn = AttentionParams::init(embed_dim, rng);
                    break;
                case MixerKind::spatial_mlp:
                    mlp = SpatialMlpParams::init(seq_len, rng);
                    break;
                case MixerKind::spectral:
                    spec = SpectralMixerParams::init(seq_len, embed_dim, 2, rng);
                    break;
            }
            auto run = [&] {
                switch (kind) {
                    case MixerKind::self_attention:
                        return self_attention(input, attn);
                    case MixerKind::spatial_mlp:
                        return spatial_mlp(input, mlp);
                    case MixerKind::spectral:
                    default:
                        return spectral_mixer(input, spec);
                }
            };
            volatile double sink = 0.0;
            for (int i = 0; i < warmup; ++i) sink += run().data()[0];
            std::vector<double> times(repeats);
            for (int i = 0; i < repeats; ++i) {
                const auto start = clock::now();
                Tensor out = run();
                const auto stop = clock::now();
                sink += out.data()[0];
                times[i] = static_cast<double>(
                    std::chrono::duration_cast<std::chrono::nanoseconds>(stop -
                                                                         start)
                        .count());
            }
            (void)sink;
            std::sort(times.begin(), times.end());
            const double median =
                repeats % 2 ? times[repeats / 2]
                            : 0.5 * (times[repeats / 2 - 1] + times[repeats / 2]);
            BenchRecord rec;
            rec.kind = kind;
            rec.seq_len = seq_len;
            rec.embed_dim = embed_dim;
            rec.median_ns = median;
            rec.analytic_flops = flops(kind, seq_len, embed_dim);
            rec.repeats = repeats;
            rec.low_confidence = repeats < 20;
            records.push_back(rec);
        }
    }
    return records;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
    std::string out = "kind,L,d,median_ns,flops,low_confidence\n";
    char line[160];
    for (const BenchRecord& r : records) {
        std::snprintf(line, sizeof(line), "%s,%d,%d,%.0f,%.0f,%d\n",
                      to_string(r.kind).c_str(), r.seq_len, r.embed_dim,
                      r.median_ns, r.analytic_flops, r.low_confidence ? 1 : 0);
        out += line;
    }
    return out;
}

}  // namespace fsru
