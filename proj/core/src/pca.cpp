#include "fsru/pca.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fsru {

namespace {

// Cyclic Jacobi rotations on a symmetric matrix; returns eigenvalues on the
// diagonal of `a` and eigenvectors in the columns of `v`.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, int n) {
    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto at = [&](std::vector<double>& m, int i, int j) -> double& {
        return m[static_cast<std::size_t>(i) * n + j];
    };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(a, i, j) * at(a, i, j);
        if (off < 1e-24) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(a, k, p), akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(a, p, k), aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = at(v, k, p), vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
}

}  // namespace

Projection project_features(const Tensor& features) {
    if (features.rank() != 2)
        throw std::invalid_argument("project_features: expected (B x d)");
    const int b = features.shape()[0], d = features.shape()[1];
    if (b < 3)
        throw std::invalid_argument("project_features: need at least 3 samples");

    std::vector<double> mean(d, 0.0);
    const double* rows = features.data().data();
    for (int i = 0; i < b; ++i)
        for (int c = 0; c < d; ++c)
            mean[c] += rows[static_cast<std::size_t>(i) * d + c];
    for (double& v : mean) v /= b;

    std::vector<double> covariance(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < b; ++i)
        for (int c0 = 0; c0 < d; ++c0) {
            const double dc0 =
                rows[static_cast<std::size_t>(i) * d + c0] - mean[c0];
            for (int c1 = 0; c1 < d; ++c1)
                covariance[static_cast<std::size_t>(c0) * d + c1] +=
                    dc0 *
                    (rows[static_cast<std::size_t>(i) * d + c1] - mean[c1]);
        }
    for (double& v : covariance) v /= (b - 1);
    double trace = 0.0;
    for (int c = 0; c < d; ++c)
        trace += covariance[static_cast<std::size_t>(c) * d + c];

    Projection projection;
    projection.x.assign(b, 0.0);
    projection.y.assign(b, 0.0);
    if (!(trace > 1e-18)) {
        projection.degenerate = true;
        return projection;
    }

    std::vector<double> eigenvectors;
    jacobi_eigen(covariance, eigenvectors, d);
    // top-2 eigenvalues by diagonal entry
    int first = 0, second = d > 1 ? 1 : 0;
    auto diag = [&](int i) {
        return covariance[static_cast<std::size_t>(i) * d + i];
    };
    if (diag(second) > diag(first)) std::swap(first, second);
    for (int c = 2; c < d; ++c) {
        if (diag(c) > diag(first)) {
            second = first;
            first = c;
        } else if (diag(c) > diag(second)) {
            second = c;
        }
    }

    for (int i = 0; i < b; ++i) {
        double px = 0.0, py = 0.0;
        for (int c = 0; c < d; ++c) {
            const double centered =
                rows[static_cast<std::size_t>(i) * d + c] - mean[c];
            px += centered * eigenvectors[static_cast<std::size_t>(c) * d + first];
            py += centered * eigenvectors[static_cast<std::size_t>(c) * d + second];
        }
        projection.x[i] = px;
        projection.y[i] = py;
    }
    return projection;
}

std::string projection_csv(const Projection& projection,
                           const std::vector<int>& labels) {
    if (projection.x.size() != labels.size())
        throw std::invalid_argument("projection_csv: label count mismatch");
    std::string out = "x,y,label\n";
    char line[96];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.8f,%.8f,%d\n", projection.x[i],
                      projection.y[i], labels[i]);
        out += line;
    }
    return out;
}

}  // namespace fsru
