#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fsru/embedding.hpp"
#include "fsru/graph.hpp"
#include "fsru/ops.hpp"
#include "support/test_support.hpp"

using namespace fsru;

namespace {

EmbeddingConfig small_config() {
    EmbeddingConfig cfg;
    cfg.vocab_size = 10;
    cfg.embed_dim = 6;
    cfg.text_len = 5;
    cfg.grid_h = 2;
    cfg.grid_w = 2;
    cfg.patch_size = 2;
    return cfg;
}

}  // namespace

TEST_CASE("all-padding text embeds to zeros") {
    EmbeddingConfig cfg = small_config();
    Rng rng(1);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    TextSample sample;
    sample.token_ids.assign(cfg.text_len, 3);
    sample.mask.assign(cfg.text_len, 0);
    Tensor out = embed_text(sample, params, cfg);
    for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("position code at position 0 is [0,1,0,1,...]") {
    Tensor pe = sinusoidal_positions(4, 6);
    for (int c = 0; c < 6; ++c)
        CHECK(pe.at({0, c}) == doctest::Approx(c % 2 ? 1.0 : 0.0));

    EmbeddingConfig cfg = small_config();
    Rng rng(2);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    TextSample sample;
    sample.token_ids = {0};
    sample.mask = {1};
    Tensor out = embed_text(sample, params, cfg);
    for (int c = 0; c < cfg.embed_dim; ++c) {
        const double expected =
            params.word_table.at({0, c}) + (c % 2 ? 1.0 : 0.0);
        CHECK(out.at({0, c}) == doctest::Approx(expected));
    }
    // padded tail rows stay zero
    for (int i = 1; i < cfg.text_len; ++i)
        for (int c = 0; c < cfg.embed_dim; ++c) CHECK(out.at({i, c}) == 0.0);
}

TEST_CASE("swapped positions differ exactly by the position-code difference") {
    EmbeddingConfig cfg = small_config();
    Rng rng(3);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    TextSample ab, ba;
    ab.token_ids = {7, 4};
    ab.mask = {1, 1};
    ba.token_ids = {4, 7};
    ba.mask = {1, 1};
    Tensor out_ab = embed_text(ab, params, cfg);
    Tensor out_ba = embed_text(ba, params, cfg);

    // independent recompute of the sinusoid table
    auto code = [&](int pos, int c) {
        const int pair = c / 2;
        const double angle =
            pos * std::pow(10000.0, -2.0 * pair / cfg.embed_dim);
        return c % 2 ? std::cos(angle) : std::sin(angle);
    };
    for (int c = 0; c < cfg.embed_dim; ++c) {
        // row 0 of ab holds token 7 at position 0; row 1 of ba holds token 7
        // at position 1: the difference is PE(0) - PE(1).
        const double diff = out_ab.at({0, c}) - out_ba.at({1, c});
        CHECK(diff == doctest::Approx(code(0, c) - code(1, c)).epsilon(1e-12));
    }
}

TEST_CASE("unknown token ids are rejected") {
    EmbeddingConfig cfg = small_config();
    Rng rng(4);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    TextSample sample;
    sample.token_ids = {cfg.vocab_size};
    sample.mask = {1};
    CHECK_THROWS_AS(embed_text(sample, params, cfg), std::invalid_argument);
    sample.mask = {0};  // padded positions are not validated
    CHECK_NOTHROW(embed_text(sample, params, cfg));
}

TEST_CASE("all-zero image with zero conv bias embeds to zeros") {
    EmbeddingConfig cfg = small_config();
    Rng rng(5);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    ImageSample img;
    img.grid_h = cfg.grid_h;
    img.grid_w = cfg.grid_w;
    img.patch_size = cfg.patch_size;
    img.pixels.assign(cfg.patch_count() * cfg.patch_pixels(), 0.0);
    Tensor out = embed_image(img, params, cfg);
    for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("width-3 conv spreads a one-hot patch to three rows") {
    EmbeddingConfig cfg = small_config();
    Rng rng(6);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    // make the conv support visible through the relu
    for (double& v : params.conv_bias.mutable_data()) v = 0.0;
    ImageSample img;
    img.grid_h = cfg.grid_h;
    img.grid_w = cfg.grid_w;
    img.patch_size = cfg.patch_size;
    img.pixels.assign(cfg.patch_count() * cfg.patch_pixels(), 0.0);
    const int hot = 1;
    for (int p = 0; p < cfg.patch_pixels(); ++p)
        img.pixels[hot * cfg.patch_pixels() + p] = 1.0;
    Tensor out = embed_image(img, params, cfg);
    for (int i = 0; i < cfg.patch_count(); ++i) {
        double row_mass = 0.0;
        for (int c = 0; c < cfg.embed_dim; ++c)
            row_mass += std::abs(out.at({i, c}));
        const bool neighbor = i == hot - 1 || i == hot || i == hot + 1;
        if (neighbor)
            CHECK(row_mass > 0.0);
        else
            CHECK(row_mass == 0.0);
    }
}

TEST_CASE("embed_image matches a dense per-row oracle") {
    EmbeddingConfig cfg = small_config();
    Rng rng(7);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    ImageSample img;
    img.grid_h = cfg.grid_h;
    img.grid_w = cfg.grid_w;
    img.patch_size = cfg.patch_size;
    img.pixels.resize(cfg.patch_count() * cfg.patch_pixels());
    for (double& v : img.pixels) v = rng.uniform();
    Tensor out = embed_image(img, params, cfg);

    const int n = cfg.patch_count(), pp = cfg.patch_pixels(),
              d = cfg.embed_dim;
    // oracle: explicit projection, explicit circular conv, explicit relu
    std::vector<double> projected(n * d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c)
            for (int p = 0; p < pp; ++p)
                projected[i * d + c] +=
                    img.pixels[i * pp + p] * params.patch_proj.at({p, c});
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) {
            double acc = params.conv_bias.at({0, c});
            for (int e = 0; e < d; ++e) {
                acc += projected[((i - 1 + n) % n) * d + e] *
                       params.conv_prev.at({e, c});
                acc += projected[i * d + e] * params.conv_center.at({e, c});
                acc += projected[((i + 1) % n) * d + e] *
                       params.conv_next.at({e, c});
            }
            const double want = acc > 0.0 ? acc : 0.0;
            CHECK(out.at({i, c}) == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("wrong patch geometry is rejected") {
    EmbeddingConfig cfg = small_config();
    Rng rng(8);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    ImageSample img;
    img.grid_h = cfg.grid_h;
    img.grid_w = cfg.grid_w;
    img.patch_size = cfg.patch_size + 1;
    img.pixels.assign(cfg.patch_count() * 9, 0.0);
    CHECK_THROWS_AS(embed_image(img, params, cfg), std::invalid_argument);
    img.patch_size = cfg.patch_size;
    img.grid_h = cfg.grid_h + 1;
    CHECK_THROWS_AS(embed_image(img, params, cfg), std::invalid_argument);
}

TEST_CASE("embedding gradients pass finite differences") {
    EmbeddingConfig cfg = small_config();
    Rng rng(9);
    EmbeddingParams params = EmbeddingParams::init(cfg, rng);
    TextSample text;
    text.token_ids = {1, 4, 4, 0};
    text.mask = {1, 1, 1, 1};
    ImageSample img;
    img.grid_h = cfg.grid_h;
    img.grid_w = cfg.grid_w;
    img.patch_size = cfg.patch_size;
    img.pixels.resize(cfg.patch_count() * cfg.patch_pixels());
    for (double& v : img.pixels) v = rng.uniform();

    auto loss_fn = [&] {
        Tensor t = embed_text(text, params, cfg);
        Tensor v = embed_image(img, params, cfg);
        return add(sum_all(mul(t, t)), sum_all(mul(v, v)));
    };
    Graph graph;
    Tensor loss;
    {
        Graph::Record record(graph);
        loss = loss_fn();
    }
    graph.backward(loss);
    std::vector<Tensor> params_list;
    for (auto& [name, tensor] : params.named("embedding"))
        params_list.push_back(tensor);
    auto report = testsupport::check_gradients(
        [&] { return loss_fn().item(); }, params_list);
    CHECK(report.checked > 0);
    CHECK(report.failures == 0);
}
