#pragma once

#include <cstdint>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

// Elementwise binary ops broadcast over extent-1 axes only; ranks must
// match. Shape mismatches throw std::invalid_argument.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor exp_op(const Tensor& a);
Tensor log_op(const Tensor& a);
Tensor sqrt_op(const Tensor& a);
// min(max(x, lo), hi); gradient passes through on the closed interval.
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor matmul(const Tensor& a, const Tensor& b);     // (r x s) . (s x t)
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // (r x s) . (t x s)^T

Tensor sum_all(const Tensor& a);                 // -> shape {1}
Tensor sum_axis(const Tensor& a, int axis);      // keeps the axis with extent 1
Tensor mean_axis(const Tensor& a, int axis);     // keeps the axis with extent 1
Tensor softmax(const Tensor& a, int axis);

// Per-channel affine map over the channel (last) axis: y = x * w + b with
// w, b of shape {d} applied to every row of an (L x d) input.
Tensor conv1x1(const Tensor& x, const Tensor& w, const Tensor& b);

// Plane i of a rank-3 tensor along axis 0: (k x m x d) -> (m x d).
Tensor slice_plane(const Tensor& a, int plane);

// Circularly rotates the rows of an (L x d) tensor: out[i] = in[(i+shift) mod L].
Tensor rotate_rows(const Tensor& a, int shift);

// Stacks B tensors of shape (1 x d) into (B x d).
Tensor stack_rows(const std::vector<Tensor>& rows);

// Row lookup with padding: out[i] = table[ids[i]] where mask[i] != 0, else 0.
// Ids at unmasked positions must be < table rows ("unknown token" otherwise).
Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids,
                        const std::vector<std::uint8_t>& mask);

// (a.re + j a.im)(b.re + j b.im) = (ac - bd) + j(ad + bc)
ComplexTensor complex_mul(const ComplexTensor& a, const ComplexTensor& b);
// re^2 + im^2; real-valued, entrywise >= 0.
Tensor abs_sq(const ComplexTensor& a);

// Raw matrix kernels shared by forward and backward paths.
namespace detail {
void mm_nn(const double* a, const double* b, double* out, int r, int s, int t,
           bool accumulate);
void mm_nt(const double* a, const double* b, double* out, int r, int s, int t,
           bool accumulate);
void mm_tn(const double* a, const double* b, double* out, int r, int s, int t,
           bool accumulate);
}  // namespace detail

}  // namespace fsru
