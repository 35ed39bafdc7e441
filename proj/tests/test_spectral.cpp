#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fsru/graph.hpp"
#include "fsru/ops.hpp"
#include "fsru/spectral.hpp"
#include "support/test_support.hpp"

using namespace fsru;
using testsupport::kPi;

namespace {

SpectralConfig small_config() {
    SpectralConfig cfg;
    cfg.text_len = 8;
    cfg.patch_count = 4;
    cfg.embed_dim = 3;
    cfg.filter_count = 2;
    return cfg;
}

}  // namespace

TEST_CASE("spectrum of constant rows is all DC") {
    Tensor x = Tensor::full({8, 2}, 3.5);
    ComplexTensor spec = spectrum(x);
    CHECK(spec.re.at({0, 0}) == doctest::Approx(8 * 3.5));
    for (int k = 1; k < 8; ++k)
        for (int c = 0; c < 2; ++c) {
            CHECK(std::abs(spec.re.at({k, c})) < 1e-12);
            CHECK(std::abs(spec.im.at({k, c})) < 1e-12);
        }
}

TEST_CASE("single tone lands in its two mirror bins") {
    const int len = 16;
    std::vector<double> data(len, 0.0);
    for (int i = 0; i < len; ++i) data[i] = std::cos(2.0 * kPi * 2 * i / len);
    ComplexTensor spec = spectrum(Tensor({len, 1}, std::move(data)));
    Tensor power = abs_sq(spec);
    for (int k = 0; k < len; ++k) {
        if (k == 2 || k == len - 2)
            CHECK(power.at({k, 0}) > 1.0);
        else
            CHECK(power.at({k, 0}) < 1e-18);
    }
}

TEST_CASE("spectrum matches the naive oracle per channel") {
    Rng rng(21);
    Tensor x = testsupport::random_tensor({8, 3}, rng);
    ComplexTensor spec = spectrum(x);
    for (int c = 0; c < 3; ++c) {
        std::vector<std::complex<double>> line(8);
        for (int i = 0; i < 8; ++i) line[i] = {x.at({i, c}), 0.0};
        auto want = testsupport::naive_dft(line);
        for (int k = 0; k < 8; ++k) {
            CHECK(std::abs(spec.re.at({k, c}) - want[k].real()) < 1e-9);
            CHECK(std::abs(spec.im.at({k, c}) - want[k].imag()) < 1e-9);
        }
    }
}

TEST_CASE("conjugate symmetry holds for real inputs") {
    Rng rng(23);
    Tensor x = testsupport::random_tensor({16, 2}, rng);
    ComplexTensor spec = spectrum(x);
    for (int k = 1; k < 16; ++k)
        for (int c = 0; c < 2; ++c) {
            CHECK(spec.re.at({k, c}) ==
                  doctest::Approx(spec.re.at({16 - k, c})).epsilon(1e-10));
            CHECK(spec.im.at({k, c}) ==
                  doctest::Approx(-spec.im.at({16 - k, c})).epsilon(1e-10));
        }
}

TEST_CASE("cosine weights sum to zero for every filter count") {
    for (int k = 1; k <= 64; ++k) {
        const auto weights = usc_cosine_weights(k);
        double total = 0.0;
        for (double w : weights) total += w;
        CHECK(std::abs(total) < 1e-12);
    }
    CHECK_THROWS_WITH_AS(usc_cosine_weights(0), "empty filter bank",
                         std::invalid_argument);
}

TEST_CASE("usc with one filter is forced to zero by its cosine weight") {
    Rng rng(25);
    Tensor x = testsupport::random_tensor({8, 3}, rng);
    Tensor bank = Tensor::ones({1, 8, 3});
    Tensor out = usc(spectrum(x), bank, 8);
    // cos(pi/2) is zero up to representation error (~6e-17)
    for (double v : out.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("usc with two filters reduces to (sqrt2/2l) |X|^2 (k1 - k2)") {
    Rng rng(27);
    const int len = 8, d = 3;
    Tensor x = testsupport::random_tensor({len, d}, rng);
    Tensor bank = testsupport::random_tensor({2, len, d}, rng, 0.5, 1.5);
    ComplexTensor spec = spectrum(x);
    Tensor out = usc(spec, bank, len);
    Tensor power = abs_sq(spec);
    const double c1 = std::cos(kPi / 4.0), c2 = std::cos(3.0 * kPi / 4.0);
    for (int i = 0; i < len; ++i)
        for (int c = 0; c < d; ++c) {
            const double want =
                power.at({i, c}) / len *
                (c1 * bank.at({0, i, c}) + c2 * bank.at({1, i, c}));
            CHECK(out.at({i, c}) == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("an all-equal filter bank cancels for k = 4") {
    Rng rng(29);
    Tensor x = testsupport::random_tensor({8, 2}, rng);
    Tensor bank = Tensor::ones({4, 8, 2});
    Tensor out = usc(spectrum(x), bank, 8);
    for (double v : out.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("usc rejects an empty bank") {
    Rng rng(31);
    Tensor x = testsupport::random_tensor({4, 2}, rng);
    Tensor bank = Tensor::ones({0, 4, 2});
    CHECK_THROWS_WITH_AS(usc(spectrum(x), bank, 4), "empty filter bank",
                         std::invalid_argument);
}

TEST_CASE("usc is invariant to any unit-modulus phase on the spectrum") {
    Rng rng(33);
    const int len = 8, d = 2;
    Tensor x = testsupport::random_tensor({len, d}, rng);
    ComplexTensor spec = spectrum(x);
    Tensor bank = testsupport::random_tensor({2, len, d}, rng, 0.5, 1.5);
    Tensor base = usc(spec, bank, len);

    // rotate each bin by a random phase
    std::vector<double> re(len * d), im(len * d);
    for (int i = 0; i < len * d; ++i) {
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double c = std::cos(phase), s = std::sin(phase);
        re[i] = spec.re.data()[i] * c - spec.im.data()[i] * s;
        im[i] = spec.re.data()[i] * s + spec.im.data()[i] * c;
    }
    ComplexTensor rotated = make_complex(Tensor({len, d}, std::move(re)),
                                         Tensor({len, d}, std::move(im)));
    Tensor out = usc(rotated, bank, len);
    for (std::size_t i = 0; i < base.numel(); ++i)
        CHECK(out.data()[i] == doctest::Approx(base.data()[i]).epsilon(1e-10));
}

TEST_CASE("csc with zero selection parameters applies the bias gate") {
    SpectralConfig cfg = small_config();
    Rng rng(35);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    for (double& v : params.image_select.mutable_data()) v = 0.0;
    Tensor text_hat =
        testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng);
    Tensor image_hat =
        testsupport::random_tensor({cfg.patch_count, cfg.embed_dim}, rng);
    auto [text_out, image_out] = csc(text_hat, image_hat, params);
    for (int i = 0; i < cfg.text_len; ++i)
        for (int c = 0; c < cfg.embed_dim; ++c)
            CHECK(text_out.at({i, c}) ==
                  doctest::Approx(text_hat.at({i, c}) *
                                  params.text_gate_b.at({c}))
                      .epsilon(1e-12));
}

TEST_CASE("identity gate conv with constant pooled spectrum scales by c") {
    SpectralConfig cfg = small_config();
    Rng rng(37);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    for (double& v : params.image_select.mutable_data()) v = 1.0;
    for (double& v : params.text_gate_w.mutable_data()) v = 1.0;
    for (double& v : params.text_gate_b.mutable_data()) v = 0.0;
    const double c = 2.25;
    Tensor image_hat = Tensor::full({cfg.patch_count, cfg.embed_dim}, c);
    Tensor text_hat =
        testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng);
    auto [text_out, image_out] = csc(text_hat, image_hat, params);
    for (std::size_t i = 0; i < text_hat.numel(); ++i)
        CHECK(text_out.data()[i] ==
              doctest::Approx(c * text_hat.data()[i]).epsilon(1e-12));
}

TEST_CASE("csc equals a hand-rolled pooling/conv loop oracle") {
    SpectralConfig cfg = small_config();
    Rng rng(39);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    Tensor text_hat =
        testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng);
    Tensor image_hat =
        testsupport::random_tensor({cfg.patch_count, cfg.embed_dim}, rng);
    auto [text_out, image_out] = csc(text_hat, image_hat, params);

    const int d = cfg.embed_dim;
    // text gate from the image side
    for (int c = 0; c < d; ++c) {
        double pooled = 0.0;
        for (int i = 0; i < cfg.patch_count; ++i)
            pooled += image_hat.at({i, c}) * params.image_select.at({i, c});
        pooled /= cfg.patch_count;
        const double gate = pooled * params.text_gate_w.at({c}) +
                            params.text_gate_b.at({c});
        for (int i = 0; i < cfg.text_len; ++i)
            CHECK(text_out.at({i, c}) ==
                  doctest::Approx(text_hat.at({i, c}) * gate).epsilon(1e-12));
    }
    // image gate from the text side
    for (int c = 0; c < d; ++c) {
        double pooled = 0.0;
        for (int i = 0; i < cfg.text_len; ++i)
            pooled += text_hat.at({i, c}) * params.text_select.at({i, c});
        pooled /= cfg.text_len;
        const double gate = pooled * params.image_gate_w.at({c}) +
                            params.image_gate_b.at({c});
        for (int i = 0; i < cfg.patch_count; ++i)
            CHECK(image_out.at({i, c}) ==
                  doctest::Approx(image_hat.at({i, c}) * gate).epsilon(1e-12));
    }
}

TEST_CASE("csc sees the other modality only through its token mean") {
    SpectralConfig cfg = small_config();
    Rng rng(41);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    for (double& v : params.image_select.mutable_data()) v = 1.0;
    Tensor text_hat =
        testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng);
    Tensor image_hat =
        testsupport::random_tensor({cfg.patch_count, cfg.embed_dim}, rng);
    auto [base_text, base_image] = csc(text_hat, image_hat, params);

    // mean-preserving perturbation of the image spectrum
    Tensor perturbed({cfg.patch_count, cfg.embed_dim},
                     {image_hat.data().begin(), image_hat.data().end()});
    for (int c = 0; c < cfg.embed_dim; ++c) {
        perturbed.mutable_data()[0 * cfg.embed_dim + c] += 0.37;
        perturbed.mutable_data()[1 * cfg.embed_dim + c] -= 0.37;
    }
    auto [text_after, image_after] = csc(text_hat, perturbed, params);
    for (std::size_t i = 0; i < base_text.numel(); ++i)
        CHECK(text_after.data()[i] ==
              doctest::Approx(base_text.data()[i]).epsilon(1e-12));
}

TEST_CASE("spectral block maps zeros to zeros when gate biases are zero") {
    SpectralConfig cfg = small_config();
    Rng rng(43);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    for (double& v : params.text_gate_b.mutable_data()) v = 0.0;
    for (double& v : params.image_gate_b.mutable_data()) v = 0.0;
    auto [text_out, image_out] =
        spectral_block(Tensor::zeros({cfg.text_len, cfg.embed_dim}),
                       Tensor::zeros({cfg.patch_count, cfg.embed_dim}), params);
    for (double v : text_out.data()) CHECK(v == 0.0);
    for (double v : image_out.data()) CHECK(v == 0.0);
}

TEST_CASE("spectral block preserves input shapes") {
    SpectralConfig cfg = small_config();
    Rng rng(45);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    Tensor x_t = testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng);
    Tensor x_v =
        testsupport::random_tensor({cfg.patch_count, cfg.embed_dim}, rng);
    auto [text_out, image_out] = spectral_block(x_t, x_v, params);
    CHECK(text_out.shape() == x_t.shape());
    CHECK(image_out.shape() == x_v.shape());
}

TEST_CASE("single-tone energy stays in its bins through usc") {
    // k=2 bank: the compressed spectrum is |X|^2-shaped, so a pure tone's
    // energy stays confined to the tone's mirror bins before the gate.
    const int len = 8, d = 1;
    std::vector<double> data(len);
    for (int i = 0; i < len; ++i) data[i] = std::cos(2.0 * kPi * 3 * i / len);
    Rng rng(47);
    Tensor bank = testsupport::random_tensor({2, len, d}, rng, 0.5, 1.5);
    Tensor out = usc(spectrum(Tensor({len, d}, std::move(data))), bank, len);
    for (int k = 0; k < len; ++k) {
        if (k == 3 || k == len - 3)
            CHECK(std::abs(out.at({k, 0})) > 1e-6);
        else
            CHECK(std::abs(out.at({k, 0})) < 1e-12);
    }
}

TEST_CASE("full spectral block passes finite differences") {
    SpectralConfig cfg;
    cfg.text_len = 4;
    cfg.patch_count = 4;
    cfg.embed_dim = 2;
    cfg.filter_count = 2;
    Rng rng(49);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    Tensor x_t =
        testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng, -1, 1,
                                   true);
    Tensor x_v = testsupport::random_tensor({cfg.patch_count, cfg.embed_dim},
                                            rng, -1, 1, true);
    auto loss_fn = [&] {
        auto [text_out, image_out] = spectral_block(x_t, x_v, params);
        return add(sum_all(mul(text_out, text_out)),
                   sum_all(mul(image_out, image_out)));
    };
    Graph graph;
    Tensor loss;
    {
        Graph::Record record(graph);
        loss = loss_fn();
    }
    graph.backward(loss);
    std::vector<Tensor> to_check = {x_t, x_v};
    for (auto& [name, tensor] : params.named("spectral"))
        to_check.push_back(tensor);
    auto report =
        testsupport::check_gradients([&] { return loss_fn().item(); }, to_check);
    CHECK(report.checked > 0);
    CHECK(report.failures == 0);
}

TEST_CASE("full gate conv variant matches a dense-map oracle") {
    SpectralConfig cfg = small_config();
    cfg.full_gate_conv = true;
    Rng rng(51);
    SpectralBlockParams params = SpectralBlockParams::init(cfg, rng);
    Tensor text_hat =
        testsupport::random_tensor({cfg.text_len, cfg.embed_dim}, rng);
    Tensor image_hat =
        testsupport::random_tensor({cfg.patch_count, cfg.embed_dim}, rng);
    auto [text_out, image_out] = csc(text_hat, image_hat, params);

    const int d = cfg.embed_dim;
    std::vector<double> pooled(d, 0.0);
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < cfg.patch_count; ++i)
            pooled[c] += image_hat.at({i, c}) * params.image_select.at({i, c});
        pooled[c] /= cfg.patch_count;
    }
    for (int c = 0; c < d; ++c) {
        double gate = params.text_gate_b.at({c});
        for (int e = 0; e < d; ++e)
            gate += pooled[e] * params.text_gate_w.at({e, c});
        for (int i = 0; i < cfg.text_len; ++i)
            CHECK(text_out.at({i, c}) ==
                  doctest::Approx(text_hat.at({i, c}) * gate).epsilon(1e-12));
    }
}
