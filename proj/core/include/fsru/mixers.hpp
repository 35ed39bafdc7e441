#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fsru/spectral.hpp"
#include "fsru/tensor.hpp"

namespace fsru {

// Token mixers are drop-in interchangeable: each maps an (L x d) sequence to
// an (L x d) sequence.
enum class MixerKind { spectral, self_attention, spatial_mlp };

std::string to_string(MixerKind kind);
MixerKind parse_mixer(const std::string& name);

struct AttentionParams {
    Tensor query;  // d x d
    Tensor key;    // d x d
    Tensor value;  // d x d

    static AttentionParams init(int embed_dim, Rng& rng);
    std::vector<std::pair<std::string, Tensor>> named(
        const std::string& prefix) const;
};

// Single-head scaled dot-product attention:
// softmax(x Wq (x Wk)^T / sqrt(d)) x Wv.
Tensor self_attention(const Tensor& x, const AttentionParams& params);

struct SpatialMlpParams {
    Tensor mix;  // L x L token-mixing matrix

    static SpatialMlpParams init(int seq_len, Rng& rng);
    std::vector<std::pair<std::string, Tensor>> named(
        const std::string& prefix) const;
};

// Linear token mixing along the sequence axis: mix . x.
Tensor spatial_mlp(const Tensor& x, const SpatialMlpParams& params);

// Single-stream frequency-domain mixer used by the timing harness: DFT, the
// filter-bank compression, a self-derived pooled gate, and the inverse
// transform. The full model couples the two modalities through csc instead.
struct SpectralMixerParams {
    Tensor bank;    // k x L x d
    Tensor select;  // L x d
    Tensor gate_w;  // {d}
    Tensor gate_b;  // {d}

    static SpectralMixerParams init(int seq_len, int embed_dim,
                                    int filter_count, Rng& rng);
};
Tensor spectral_mixer(const Tensor& x, const SpectralMixerParams& params);

// Returns (direct circular convolution along tokens, idft(dft(kernel) *
// dft(x))); the convolution theorem makes the two agree.
std::pair<Tensor, Tensor> circular_conv_equivalence(const Tensor& x,
                                                    const Tensor& kernel);

// Column of the analytic complexity table the formula is read from; image
// uses the patch count, text the token count, as the sequence length.
enum class FlopsColumn { image, text };

// Analytic FLOP counts per mixer (log base 2):
//   spatial_mlp:      L^2 d
//   self_attention:   L d^2 + L^2 d
//   spectral (image): L d log(L) + (L + d) d
//   spectral (text):  L d log(L) + (L log(d) + d) d
double flops(MixerKind kind, long seq_len, long embed_dim,
             FlopsColumn column = FlopsColumn::image);

struct BenchRecord {
    MixerKind kind;
    int seq_len = 0;
    int embed_dim = 0;
    double median_ns = 0.0;
    double analytic_flops = 0.0;
    int repeats = 0;
    bool low_confidence = false;  // fewer than 20 timed repeats
};

// Times each mixer's forward pass single-threaded on random inputs with a
// monotonic clock: `warmup` untimed runs, then the median of `repeats`.
std::vector<BenchRecord> bench(const std::vector<MixerKind>& kinds,
                               const std::vector<std::pair<int, int>>& sizes,
                               int repeats, int warmup = 5,
                               std::uint64_t seed = 1234);

// kind,L,d,median_ns,flops,low_confidence
std::string bench_csv(const std::vector<BenchRecord>& records);

}  // namespace fsru
