#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <stdexcept>
#include <vector>

#include "fsru/fft.hpp"
#include "fsru/ops.hpp"
#include "support/test_support.hpp"

using namespace fsru;
using testsupport::naive_dft;
using testsupport::naive_idft;

namespace {

ComplexTensor column(const std::vector<std::complex<double>>& values) {
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        re[i] = values[i].real();
        im[i] = values[i].imag();
    }
    const int n = static_cast<int>(values.size());
    return make_complex(Tensor({n, 1}, std::move(re)),
                        Tensor({n, 1}, std::move(im)));
}

double max_abs_err(const ComplexTensor& got,
                   const std::vector<std::complex<double>>& want) {
    double err = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        err = std::max(err, std::abs(got.re.data()[i] - want[i].real()));
        err = std::max(err, std::abs(got.im.data()[i] - want[i].imag()));
    }
    return err;
}

std::vector<std::complex<double>> random_signal(std::size_t n, Rng& rng) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return x;
}

}  // namespace

TEST_CASE("dft of zeros is zeros") {
    ComplexTensor z = complex_from_real(Tensor::zeros({8, 1}));
    ComplexTensor out = dft_1d(z, 0);
    for (double v : out.re.data()) CHECK(v == 0.0);
    for (double v : out.im.data()) CHECK(v == 0.0);
}

TEST_CASE("dft of an impulse is a flat spectrum") {
    ComplexTensor x = column({{1, 0}, {0, 0}, {0, 0}, {0, 0}});
    ComplexTensor out = dft_1d(x, 0);
    for (int k = 0; k < 4; ++k) {
        CHECK(out.re.at({k, 0}) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.im.at({k, 0}) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("dft of [1,2,3,4] matches the naive oracle") {
    std::vector<std::complex<double>> x = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
    ComplexTensor out = dft_1d(column(x), 0);
    CHECK(max_abs_err(out, naive_dft(x)) < 1e-9);
}

TEST_CASE("fast path equals the naive oracle for every power of two <= 1024") {
    Rng rng(123);
    for (std::size_t n = 2; n <= 1024; n *= 2) {
        auto x = random_signal(n, rng);
        ComplexTensor out = dft_1d(column(x), 0);
        CHECK(max_abs_err(out, naive_dft(x)) < 1e-9);
    }
}

TEST_CASE("non-power-of-two lengths fall back to the direct transform") {
    Rng rng(77);
    for (std::size_t n : {3u, 5u, 6u, 12u}) {
        auto x = random_signal(n, rng);
        ComplexTensor out = dft_1d(column(x), 0);
        CHECK(max_abs_err(out, naive_dft(x)) < 1e-9);
        ComplexTensor back = idft_1d(out, 0);
        CHECK(max_abs_err(back, x) < 1e-9);
    }
}

TEST_CASE("idft inverts dft to 1e-9 for power-of-two lengths <= 1024") {
    Rng rng(9);
    for (std::size_t n = 2; n <= 1024; n *= 2) {
        auto x = random_signal(n, rng);
        ComplexTensor out = idft_1d(dft_1d(column(x), 0), 0);
        CHECK(max_abs_err(out, x) < 1e-9);
    }
}

TEST_CASE("idft roundtrip on a 16x4 block") {
    Rng rng(41);
    Tensor re = testsupport::random_tensor({16, 4}, rng);
    Tensor im = testsupport::random_tensor({16, 4}, rng);
    ComplexTensor x = make_complex(re, im);
    ComplexTensor back = idft_1d(dft_1d(x, 0), 0);
    for (std::size_t i = 0; i < re.numel(); ++i) {
        CHECK(std::abs(back.re.data()[i] - re.data()[i]) < 1e-9);
        CHECK(std::abs(back.im.data()[i] - im.data()[i]) < 1e-9);
    }
}

TEST_CASE("idft of a flat spectrum is the impulse") {
    ComplexTensor flat = column({{1, 0}, {1, 0}, {1, 0}, {1, 0}});
    ComplexTensor out = idft_1d(flat, 0);
    CHECK(out.re.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < 4; ++i)
        CHECK(std::abs(out.re.at({i, 0})) < 1e-12);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(out.im.at({i, 0})) < 1e-12);
}

TEST_CASE("idft matches the naive inverse summation oracle") {
    Rng rng(55);
    auto x = random_signal(32, rng);
    ComplexTensor out = idft_1d(column(x), 0);
    CHECK(max_abs_err(out, naive_idft(x)) < 1e-9);
}

TEST_CASE("Parseval: sum |x|^2 equals (1/L) sum |X|^2") {
    Rng rng(31);
    for (std::size_t n : {4u, 64u, 1024u}) {
        auto x = random_signal(n, rng);
        double spatial = 0.0;
        for (const auto& v : x) spatial += std::norm(v);
        ComplexTensor spec = dft_1d(column(x), 0);
        double spectral = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spectral += spec.re.data()[i] * spec.re.data()[i] +
                        spec.im.data()[i] * spec.im.data()[i];
        spectral /= static_cast<double>(n);
        CHECK(std::abs(spatial - spectral) / spatial < 1e-9);
    }
}

TEST_CASE("dft is linear") {
    Rng rng(63);
    const double a = 1.7, b = -0.4;
    auto x = random_signal(64, rng);
    auto y = random_signal(64, rng);
    std::vector<std::complex<double>> mix(64);
    for (int i = 0; i < 64; ++i) mix[i] = a * x[i] + b * y[i];
    ComplexTensor fx = dft_1d(column(x), 0);
    ComplexTensor fy = dft_1d(column(y), 0);
    ComplexTensor fmix = dft_1d(column(mix), 0);
    for (int i = 0; i < 64; ++i) {
        const double want_re = a * fx.re.data()[i] + b * fy.re.data()[i];
        const double want_im = a * fx.im.data()[i] + b * fy.im.data()[i];
        CHECK(std::abs(fmix.re.data()[i] - want_re) < 1e-9);
        CHECK(std::abs(fmix.im.data()[i] - want_im) < 1e-9);
    }
}

TEST_CASE("empty transform axis is an error") {
    ComplexTensor empty = complex_from_real(Tensor::zeros({0, 2}));
    CHECK_THROWS_WITH_AS(dft_1d(empty, 0), "empty transform axis",
                         std::invalid_argument);
    CHECK_THROWS_AS(idft_1d(empty, 0), std::invalid_argument);
    ComplexTensor ok = complex_from_real(Tensor::zeros({2, 2}));
    CHECK_THROWS_AS(dft_1d(ok, 5), std::invalid_argument);
}

TEST_CASE("transform along axis 1 works on rank-3 blocks") {
    Rng rng(17);
    Tensor re = testsupport::random_tensor({2, 8, 3}, rng);
    ComplexTensor x = complex_from_real(re);
    ComplexTensor spec = dft_1d(x, 1);
    ComplexTensor back = idft_1d(spec, 1);
    for (std::size_t i = 0; i < re.numel(); ++i)
        CHECK(std::abs(back.re.data()[i] - re.data()[i]) < 1e-9);

    // each (outer, channel) line matches the oracle
    std::vector<std::complex<double>> line(8);
    for (int i = 0; i < 8; ++i) line[i] = {re.at({1, i, 2}), 0.0};
    auto want = naive_dft(line);
    for (int k = 0; k < 8; ++k) {
        CHECK(std::abs(spec.re.at({1, k, 2}) - want[k].real()) < 1e-9);
        CHECK(std::abs(spec.im.at({1, k, 2}) - want[k].imag()) < 1e-9);
    }
}
