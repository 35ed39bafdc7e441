#pragma once

// Shared test helpers: the naive-DFT oracle and a central-finite-difference
// gradient checker. These are deliberately written from the definitions and
// stay independent of the library's transform and backward paths.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "fsru/graph.hpp"
#include "fsru/rng.hpp"
#include "fsru/tensor.hpp"

namespace testsupport {

inline constexpr double kPi = 3.14159265358979323846;

// Direct O(L^2) summation of X[k] = sum_i x[i] e^{sign j 2 pi k i / L}.
inline std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x, int sign = -1) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = sign * 2.0 * kPi * static_cast<double>(k) *
                               static_cast<double>(i) / static_cast<double>(n);
            out[k] += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
    return out;
}

inline std::vector<std::complex<double>> naive_idft(
    const std::vector<std::complex<double>>& x) {
    auto out = naive_dft(x, +1);
    for (auto& v : out) v /= static_cast<double>(x.size());
    return out;
}

inline fsru::Tensor random_tensor(std::vector<int> shape, fsru::Rng& rng,
                                  double lo = -1.0, double hi = 1.0,
                                  bool requires_grad = false) {
    return fsru::Tensor::uniform(std::move(shape), lo, hi, rng, requires_grad);
}

struct GradCheckReport {
    double max_rel_err = 0.0;
    long checked = 0;
    long failures = 0;
};

// Analytic gradients must already be accumulated on the parameters (one
// backward pass). `loss_fn` re-evaluates the forward pass from the current
// parameter values without recording.
inline GradCheckReport check_gradients(
    const std::function<double()>& loss_fn, std::vector<fsru::Tensor> params,
    double step = 1e-5, double tolerance = 1e-4,
    double min_magnitude = 1e-8) {
    GradCheckReport report;
    for (fsru::Tensor& param : params) {
        auto grad = param.grad();
        auto data = param.mutable_data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double analytic = grad.empty() ? 0.0 : grad[i];
            const double saved = data[i];
            data[i] = saved + step;
            const double up = loss_fn();
            data[i] = saved - step;
            const double down = loss_fn();
            data[i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            if (std::abs(analytic) <= min_magnitude &&
                std::abs(numeric) <= min_magnitude)
                continue;
            if (std::abs(analytic) <= min_magnitude) continue;
            const double rel = std::abs(analytic - numeric) /
                               std::max(std::abs(analytic), std::abs(numeric));
            report.max_rel_err = std::max(report.max_rel_err, rel);
            ++report.checked;
            if (rel > tolerance) ++report.failures;
        }
    }
    return report;
}

}  // namespace testsupport
