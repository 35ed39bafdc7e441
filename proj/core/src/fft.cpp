#include "fsru/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fsru/graph.hpp"

namespace fsru {

namespace fft {

namespace {

constexpr double kPi = 3.14159265358979323846;

void fft_radix2(double* re, double* im, std::size_t n, int sign) {
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const double wr = std::cos(ang), wi = std::sin(ang);
        for (std::size_t i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::size_t a = i + j, b = i + j + len / 2;
                const double vr = re[b] * cr - im[b] * ci;
                const double vi = re[b] * ci + im[b] * cr;
                re[b] = re[a] - vr;
                im[b] = im[a] - vi;
                re[a] += vr;
                im[a] += vi;
                const double nr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = nr;
            }
        }
    }
}

void dft_direct(double* re, double* im, std::size_t n, int sign) {
    std::vector<double> out_re(n, 0.0), out_im(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = sign * 2.0 * kPi * static_cast<double>(k) *
                               static_cast<double>(i) / static_cast<double>(n);
            const double c = std::cos(ang), s = std::sin(ang);
            out_re[k] += re[i] * c - im[i] * s;
            out_im[k] += re[i] * s + im[i] * c;
        }
    }
    std::copy(out_re.begin(), out_re.end(), re);
    std::copy(out_im.begin(), out_im.end(), im);
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void transform_line(double* re, double* im, std::size_t length, int sign) {
    if (length == 0) throw std::invalid_argument("empty transform axis");
    if (is_power_of_two(length))
        fft_radix2(re, im, length, sign);
    else
        dft_direct(re, im, length, sign);
}

void transform_axis(const double* re_in, const double* im_in, double* re_out,
                    double* im_out, const std::vector<int>& shape, int axis,
                    int sign, double scale) {
    const int rank = static_cast<int>(shape.size());
    if (axis < 0 || axis >= rank)
        throw std::invalid_argument("transform axis out of range");
    const std::size_t len = static_cast<std::size_t>(shape[axis]);
    if (len == 0) throw std::invalid_argument("empty transform axis");
    std::size_t stride = 1;
    for (int i = rank - 1; i > axis; --i)
        stride *= static_cast<std::size_t>(shape[i]);
    std::size_t outer = 1;
    for (int i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(shape[i]);

    std::vector<double> line_re(len), line_im(len);
    for (std::size_t u = 0; u < outer; ++u) {
        for (std::size_t v = 0; v < stride; ++v) {
            const std::size_t base = u * len * stride + v;
            for (std::size_t i = 0; i < len; ++i) {
                line_re[i] = re_in[base + i * stride];
                line_im[i] = im_in[base + i * stride];
            }
            transform_line(line_re.data(), line_im.data(), len, sign);
            for (std::size_t i = 0; i < len; ++i) {
                re_out[base + i * stride] = scale * line_re[i];
                im_out[base + i * stride] = scale * line_im[i];
            }
        }
    }
}

}  // namespace fft

namespace {

// Shared by dft_1d and idft_1d: forward sign/scale define the transform,
// and the backward pass applies the opposite sign with the same scale
// (the real-pair Jacobian of a linear transform is its transpose).
ComplexTensor transform_op(const char* name, const ComplexTensor& x, int axis,
                           int sign, bool normalize) {
    if (x.re.shape() != x.im.shape())
        throw std::invalid_argument("complex tensor: re/im shape mismatch");
    const auto& shape = x.re.shape();
    if (axis < 0 || axis >= static_cast<int>(shape.size()))
        throw std::invalid_argument("transform axis out of range");
    if (shape[axis] == 0) throw std::invalid_argument("empty transform axis");
    const double scale =
        normalize ? 1.0 / static_cast<double>(shape[axis]) : 1.0;

    std::vector<double> out_re(x.re.numel()), out_im(x.im.numel());
    fft::transform_axis(x.re.data().data(), x.im.data().data(), out_re.data(),
                        out_im.data(), shape, axis, sign, scale);
    const bool needs_grad = x.re.requires_grad() || x.im.requires_grad();
    Tensor re(shape, std::move(out_re), needs_grad);
    Tensor im(shape, std::move(out_im), needs_grad);

    record_op(name, {x.re, x.im}, {re, im},
              [ire = x.re.impl(), iim = x.im.impl(), ore = re.impl(),
               oim = im.impl(), shape, axis, sign, scale] {
                  const std::size_t n = ire->data.size();
                  std::vector<double> gr(n, 0.0), gi(n, 0.0);
                  if (!ore->grad.empty()) gr = ore->grad;
                  if (!oim->grad.empty()) gi = oim->grad;
                  std::vector<double> dr(n), di(n);
                  fft::transform_axis(gr.data(), gi.data(), dr.data(),
                                      di.data(), shape, axis, -sign, scale);
                  if (ire->requires_grad)
                      ire->accumulate_grad(dr.data(), n);
                  if (iim->requires_grad)
                      iim->accumulate_grad(di.data(), n);
              });
    return ComplexTensor{std::move(re), std::move(im)};
}

}  // namespace

ComplexTensor dft_1d(const ComplexTensor& x, int axis) {
    return transform_op("dft_1d", x, axis, -1, false);
}

ComplexTensor idft_1d(const ComplexTensor& x, int axis) {
    return transform_op("idft_1d", x, axis, +1, true);
}

}  // namespace fsru
