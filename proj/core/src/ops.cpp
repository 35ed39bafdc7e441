#include "fsru/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fsru/graph.hpp"

namespace fsru {

namespace {

double* ensure_grad(const std::shared_ptr<TensorImpl>& impl) {
    if (impl->grad.empty()) impl->grad.assign(impl->data.size(), 0.0);
    return impl->grad.data();
}

bool any_requires(std::initializer_list<Tensor> ts) {
    for (const Tensor& t : ts)
        if (t.requires_grad()) return true;
    return false;
}

// Extents and strides padded to rank 3; broadcast axes get stride 0.
struct BroadcastPlan {
    std::array<int, 3> extent{1, 1, 1};
    std::array<std::size_t, 3> a_stride{0, 0, 0};
    std::array<std::size_t, 3> b_stride{0, 0, 0};
    std::vector<int> out_shape;
};

BroadcastPlan make_plan(const char* op, const std::vector<int>& a,
                        const std::vector<int>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(op) + ": rank mismatch " +
                                    shape_str(a) + " vs " + shape_str(b));
    BroadcastPlan plan;
    plan.out_shape.resize(a.size());
    const int pad = 3 - static_cast<int>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i] && a[i] != 1 && b[i] != 1)
            throw std::invalid_argument(std::string(op) +
                                        ": incompatible shapes " + shape_str(a) +
                                        " vs " + shape_str(b));
        plan.out_shape[i] = std::max(a[i], b[i]);
        plan.extent[pad + static_cast<int>(i)] = plan.out_shape[i];
    }
    std::size_t astr = 1, bstr = 1;
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
        plan.a_stride[pad + i] = (a[i] == 1 && plan.out_shape[i] != 1) ? 0 : astr;
        plan.b_stride[pad + i] = (b[i] == 1 && plan.out_shape[i] != 1) ? 0 : bstr;
        astr *= static_cast<std::size_t>(a[i]);
        bstr *= static_cast<std::size_t>(b[i]);
    }
    return plan;
}

// ga and gb receive d(out)/d(a) and d(out)/d(b) multiplied by the incoming
// gradient; either pointer may be null when that side needs no gradient.
using BinaryGradFn = void (*)(double g, double av, double bv, double* ga,
                              double* gb);

template <typename Fwd>
Tensor broadcast_binary(const char* op, const Tensor& a, const Tensor& b,
                        Fwd fwd, BinaryGradFn grad_fn) {
    BroadcastPlan plan = make_plan(op, a.shape(), b.shape());
    std::vector<double> out_data(shape_numel(plan.out_shape));
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    std::size_t o = 0;
    for (int i0 = 0; i0 < plan.extent[0]; ++i0)
        for (int i1 = 0; i1 < plan.extent[1]; ++i1)
            for (int i2 = 0; i2 < plan.extent[2]; ++i2, ++o) {
                const std::size_t ai = i0 * plan.a_stride[0] +
                                       i1 * plan.a_stride[1] +
                                       i2 * plan.a_stride[2];
                const std::size_t bi = i0 * plan.b_stride[0] +
                                       i1 * plan.b_stride[1] +
                                       i2 * plan.b_stride[2];
                out_data[o] = fwd(ad[ai], bd[bi]);
            }
    Tensor out(plan.out_shape, std::move(out_data),
               any_requires({a, b}));
    record_op(op, {a, b}, {out},
              [ia = a.impl(), ib = b.impl(), io = out.impl(), plan, grad_fn] {
                  if (io->grad.empty()) return;
                  double* ga = ia->requires_grad ? ensure_grad(ia) : nullptr;
                  double* gb = ib->requires_grad ? ensure_grad(ib) : nullptr;
                  const double* ad = ia->data.data();
                  const double* bd = ib->data.data();
                  const double* g = io->grad.data();
                  std::size_t o = 0;
                  for (int i0 = 0; i0 < plan.extent[0]; ++i0)
                      for (int i1 = 0; i1 < plan.extent[1]; ++i1)
                          for (int i2 = 0; i2 < plan.extent[2]; ++i2, ++o) {
                              const std::size_t ai = i0 * plan.a_stride[0] +
                                                     i1 * plan.a_stride[1] +
                                                     i2 * plan.a_stride[2];
                              const std::size_t bi = i0 * plan.b_stride[0] +
                                                     i1 * plan.b_stride[1] +
                                                     i2 * plan.b_stride[2];
                              grad_fn(g[o], ad[ai], bd[bi],
                                      ga ? ga + ai : nullptr,
                                      gb ? gb + bi : nullptr);
                          }
              });
    return out;
}

// dy/dx expressed in terms of the input x and output y.
template <typename Fwd, typename Deriv>
Tensor unary(const char* op, const Tensor& a, Fwd fwd, Deriv deriv) {
    std::vector<double> out_data(a.numel());
    const double* ad = a.data().data();
    for (std::size_t i = 0; i < out_data.size(); ++i) out_data[i] = fwd(ad[i]);
    Tensor out(a.shape(), std::move(out_data), a.requires_grad());
    record_op(op, {a}, {out}, [ia = a.impl(), io = out.impl(), deriv] {
        if (io->grad.empty() || !ia->requires_grad) return;
        double* ga = ensure_grad(ia);
        const double* g = io->grad.data();
        const double* x = ia->data.data();
        const double* y = io->data.data();
        for (std::size_t i = 0; i < io->data.size(); ++i)
            ga[i] += g[i] * deriv(x[i], y[i]);
    });
    return out;
}

// Calls fn(base_offset, stride, length) for every 1-D line along `axis`.
template <typename Fn>
void for_each_line(const std::vector<int>& shape, int axis, Fn&& fn) {
    const int rank = static_cast<int>(shape.size());
    if (axis < 0 || axis >= rank)
        throw std::invalid_argument("axis out of range for shape " +
                                    shape_str(shape));
    std::size_t stride = 1;
    for (int i = rank - 1; i > axis; --i)
        stride *= static_cast<std::size_t>(shape[i]);
    const std::size_t len = static_cast<std::size_t>(shape[axis]);
    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(shape[i]);
    for (int i = axis + 1; i < rank; ++i)
        inner *= static_cast<std::size_t>(shape[i]);
    for (std::size_t u = 0; u < outer; ++u)
        for (std::size_t v = 0; v < inner; ++v)
            fn(u * len * stride + v, stride, len);
}

void check_rank2(const char* op, const Tensor& t) {
    if (t.rank() != 2)
        throw std::invalid_argument(std::string(op) + ": expected rank 2, got " +
                                    shape_str(t.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return broadcast_binary(
        "add", a, b, [](double x, double y) { return x + y; },
        [](double g, double, double, double* ga, double* gb) {
            if (ga) *ga += g;
            if (gb) *gb += g;
        });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return broadcast_binary(
        "sub", a, b, [](double x, double y) { return x - y; },
        [](double g, double, double, double* ga, double* gb) {
            if (ga) *ga += g;
            if (gb) *gb -= g;
        });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return broadcast_binary(
        "mul", a, b, [](double x, double y) { return x * y; },
        [](double g, double av, double bv, double* ga, double* gb) {
            if (ga) *ga += g * bv;
            if (gb) *gb += g * av;
        });
}

Tensor div(const Tensor& a, const Tensor& b) {
    return broadcast_binary(
        "div", a, b, [](double x, double y) { return x / y; },
        [](double g, double av, double bv, double* ga, double* gb) {
            if (ga) *ga += g / bv;
            if (gb) *gb -= g * av / (bv * bv);
        });
}

Tensor neg(const Tensor& a) {
    return unary(
        "neg", a, [](double x) { return -x; },
        [](double, double) { return -1.0; });
}

Tensor scale(const Tensor& a, double c) {
    return unary(
        "scale", a, [c](double x) { return c * x; },
        [c](double, double) { return c; });
}

Tensor add_scalar(const Tensor& a, double c) {
    return unary(
        "add_scalar", a, [c](double x) { return x + c; },
        [](double, double) { return 1.0; });
}

Tensor relu(const Tensor& a) {
    return unary(
        "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor exp_op(const Tensor& a) {
    return unary(
        "exp", a, [](double x) { return std::exp(x); },
        [](double, double y) { return y; });
}

Tensor log_op(const Tensor& a) {
    return unary(
        "log", a, [](double x) { return std::log(x); },
        [](double x, double) { return 1.0 / x; });
}

Tensor sqrt_op(const Tensor& a) {
    return unary(
        "sqrt", a, [](double x) { return std::sqrt(x); },
        [](double, double y) { return 0.5 / y; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    return unary(
        "clamp", a,
        [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
        [lo, hi](double x, double) {
            return (x >= lo && x <= hi) ? 1.0 : 0.0;
        });
}

namespace detail {

void mm_nn(const double* a, const double* b, double* out, int r, int s, int t,
           bool accumulate) {
    if (!accumulate) std::fill(out, out + static_cast<std::size_t>(r) * t, 0.0);
    for (int i = 0; i < r; ++i) {
        double* orow = out + static_cast<std::size_t>(i) * t;
        for (int k = 0; k < s; ++k) {
            const double av = a[static_cast<std::size_t>(i) * s + k];
            const double* brow = b + static_cast<std::size_t>(k) * t;
            for (int j = 0; j < t; ++j) orow[j] += av * brow[j];
        }
    }
}

void mm_nt(const double* a, const double* b, double* out, int r, int s, int t,
           bool accumulate) {
    for (int i = 0; i < r; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * s;
        double* orow = out + static_cast<std::size_t>(i) * t;
        for (int j = 0; j < t; ++j) {
            const double* brow = b + static_cast<std::size_t>(j) * s;
            double acc = 0.0;
            for (int k = 0; k < s; ++k) acc += arow[k] * brow[k];
            if (accumulate)
                orow[j] += acc;
            else
                orow[j] = acc;
        }
    }
}

void mm_tn(const double* a, const double* b, double* out, int r, int s, int t,
           bool accumulate) {
    // a is (s x r), b is (s x t); out = a^T . b, shape (r x t)
    if (!accumulate) std::fill(out, out + static_cast<std::size_t>(r) * t, 0.0);
    for (int k = 0; k < s; ++k) {
        const double* arow = a + static_cast<std::size_t>(k) * r;
        const double* brow = b + static_cast<std::size_t>(k) * t;
        for (int i = 0; i < r; ++i) {
            const double av = arow[i];
            double* orow = out + static_cast<std::size_t>(i) * t;
            for (int j = 0; j < t; ++j) orow[j] += av * brow[j];
        }
    }
}

}  // namespace detail

Tensor matmul(const Tensor& a, const Tensor& b) {
    check_rank2("matmul", a);
    check_rank2("matmul", b);
    const int r = a.shape()[0], s = a.shape()[1];
    if (b.shape()[0] != s)
        throw std::invalid_argument("matmul: inner extents differ " +
                                    shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    const int t = b.shape()[1];
    std::vector<double> out_data(static_cast<std::size_t>(r) * t);
    detail::mm_nn(a.data().data(), b.data().data(), out_data.data(), r, s, t,
                  false);
    Tensor out({r, t}, std::move(out_data), any_requires({a, b}));
    record_op("matmul", {a, b}, {out},
              [ia = a.impl(), ib = b.impl(), io = out.impl(), r, s, t] {
                  if (io->grad.empty()) return;
                  const double* g = io->grad.data();
                  if (ia->requires_grad)
                      detail::mm_nt(g, ib->data.data(), ensure_grad(ia), r, t, s,
                                    true);
                  if (ib->requires_grad)
                      detail::mm_tn(ia->data.data(), g, ensure_grad(ib), s, r, t,
                                    true);
              });
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    check_rank2("matmul_nt", a);
    check_rank2("matmul_nt", b);
    const int r = a.shape()[0], s = a.shape()[1];
    if (b.shape()[1] != s)
        throw std::invalid_argument("matmul_nt: inner extents differ " +
                                    shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    const int t = b.shape()[0];
    std::vector<double> out_data(static_cast<std::size_t>(r) * t);
    detail::mm_nt(a.data().data(), b.data().data(), out_data.data(), r, s, t,
                  false);
    Tensor out({r, t}, std::move(out_data), any_requires({a, b}));
    record_op("matmul_nt", {a, b}, {out},
              [ia = a.impl(), ib = b.impl(), io = out.impl(), r, s, t] {
                  if (io->grad.empty()) return;
                  const double* g = io->grad.data();
                  if (ia->requires_grad)
                      detail::mm_nn(g, ib->data.data(), ensure_grad(ia), r, t, s,
                                    true);
                  if (ib->requires_grad)
                      detail::mm_tn(g, ia->data.data(), ensure_grad(ib), t, r, s,
                                    true);
              });
    return out;
}

Tensor sum_all(const Tensor& a) {
    double total = 0.0;
    for (double v : a.data()) total += v;
    Tensor out({1}, {total}, a.requires_grad());
    record_op("sum_all", {a}, {out}, [ia = a.impl(), io = out.impl()] {
        if (io->grad.empty() || !ia->requires_grad) return;
        double* ga = ensure_grad(ia);
        const double g = io->grad[0];
        for (std::size_t i = 0; i < ia->data.size(); ++i) ga[i] += g;
    });
    return out;
}

namespace {

Tensor reduce_axis(const char* op, const Tensor& a, int axis, bool mean) {
    std::vector<int> out_shape = a.shape();
    if (axis < 0 || axis >= a.rank())
        throw std::invalid_argument(std::string(op) + ": axis out of range");
    const double denom = mean ? static_cast<double>(out_shape[axis]) : 1.0;
    if (out_shape[axis] == 0)
        throw std::invalid_argument(std::string(op) + ": empty axis");
    out_shape[axis] = 1;
    std::vector<double> out_data(shape_numel(out_shape), 0.0);
    const double* ad = a.data().data();
    std::size_t slot = 0;
    for_each_line(a.shape(), axis,
                  [&](std::size_t base, std::size_t stride, std::size_t len) {
                      double acc = 0.0;
                      for (std::size_t i = 0; i < len; ++i)
                          acc += ad[base + i * stride];
                      out_data[slot++] = acc / denom;
                  });
    Tensor out(out_shape, std::move(out_data), a.requires_grad());
    record_op(op, {a}, {out},
              [ia = a.impl(), io = out.impl(), axis, denom,
               in_shape = a.shape()] {
                  if (io->grad.empty() || !ia->requires_grad) return;
                  double* ga = ensure_grad(ia);
                  const double* g = io->grad.data();
                  std::size_t slot = 0;
                  for_each_line(in_shape, axis,
                                [&](std::size_t base, std::size_t stride,
                                    std::size_t len) {
                                    const double gv = g[slot++] / denom;
                                    for (std::size_t i = 0; i < len; ++i)
                                        ga[base + i * stride] += gv;
                                });
              });
    return out;
}

}  // namespace

Tensor sum_axis(const Tensor& a, int axis) {
    return reduce_axis("sum_axis", a, axis, false);
}

Tensor mean_axis(const Tensor& a, int axis) {
    return reduce_axis("mean_axis", a, axis, true);
}

Tensor softmax(const Tensor& a, int axis) {
    std::vector<double> out_data(a.numel());
    const double* ad = a.data().data();
    for_each_line(a.shape(), axis,
                  [&](std::size_t base, std::size_t stride, std::size_t len) {
                      double mx = ad[base];
                      for (std::size_t i = 1; i < len; ++i)
                          mx = std::max(mx, ad[base + i * stride]);
                      double total = 0.0;
                      for (std::size_t i = 0; i < len; ++i) {
                          const double e = std::exp(ad[base + i * stride] - mx);
                          out_data[base + i * stride] = e;
                          total += e;
                      }
                      for (std::size_t i = 0; i < len; ++i)
                          out_data[base + i * stride] /= total;
                  });
    Tensor out(a.shape(), std::move(out_data), a.requires_grad());
    record_op("softmax", {a}, {out},
              [ia = a.impl(), io = out.impl(), axis, in_shape = a.shape()] {
                  if (io->grad.empty() || !ia->requires_grad) return;
                  double* ga = ensure_grad(ia);
                  const double* g = io->grad.data();
                  const double* y = io->data.data();
                  for_each_line(in_shape, axis,
                                [&](std::size_t base, std::size_t stride,
                                    std::size_t len) {
                                    double dot = 0.0;
                                    for (std::size_t i = 0; i < len; ++i) {
                                        const std::size_t p = base + i * stride;
                                        dot += g[p] * y[p];
                                    }
                                    for (std::size_t i = 0; i < len; ++i) {
                                        const std::size_t p = base + i * stride;
                                        ga[p] += y[p] * (g[p] - dot);
                                    }
                                });
              });
    return out;
}

Tensor conv1x1(const Tensor& x, const Tensor& w, const Tensor& b) {
    check_rank2("conv1x1", x);
    const int rows = x.shape()[0], d = x.shape()[1];
    if (w.rank() != 1 || w.shape()[0] != d || b.rank() != 1 ||
        b.shape()[0] != d)
        throw std::invalid_argument(
            "conv1x1: weight/bias must have shape {channels}");
    std::vector<double> out_data(x.numel());
    const double* xd = x.data().data();
    const double* wd = w.data().data();
    const double* bd = b.data().data();
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < d; ++c) {
            const std::size_t p = static_cast<std::size_t>(i) * d + c;
            out_data[p] = xd[p] * wd[c] + bd[c];
        }
    Tensor out(x.shape(), std::move(out_data), any_requires({x, w, b}));
    record_op("conv1x1", {x, w, b}, {out},
              [ix = x.impl(), iw = w.impl(), ib = b.impl(), io = out.impl(),
               rows, d] {
                  if (io->grad.empty()) return;
                  const double* g = io->grad.data();
                  const double* xd = ix->data.data();
                  const double* wd = iw->data.data();
                  double* gx = ix->requires_grad ? ensure_grad(ix) : nullptr;
                  double* gw = iw->requires_grad ? ensure_grad(iw) : nullptr;
                  double* gb = ib->requires_grad ? ensure_grad(ib) : nullptr;
                  for (int i = 0; i < rows; ++i)
                      for (int c = 0; c < d; ++c) {
                          const std::size_t p =
                              static_cast<std::size_t>(i) * d + c;
                          if (gx) gx[p] += g[p] * wd[c];
                          if (gw) gw[c] += g[p] * xd[p];
                          if (gb) gb[c] += g[p];
                      }
              });
    return out;
}

Tensor slice_plane(const Tensor& a, int plane) {
    if (a.rank() != 3)
        throw std::invalid_argument("slice_plane: expected rank 3, got " +
                                    shape_str(a.shape()));
    const int k = a.shape()[0];
    if (plane < 0 || plane >= k)
        throw std::out_of_range("slice_plane: plane index out of range");
    const std::size_t plane_size =
        static_cast<std::size_t>(a.shape()[1]) * a.shape()[2];
    std::vector<double> out_data(
        a.data().begin() + plane * plane_size,
        a.data().begin() + (plane + 1) * plane_size);
    Tensor out({a.shape()[1], a.shape()[2]}, std::move(out_data),
               a.requires_grad());
    record_op("slice_plane", {a}, {out},
              [ia = a.impl(), io = out.impl(), plane, plane_size] {
                  if (io->grad.empty() || !ia->requires_grad) return;
                  double* ga = ensure_grad(ia);
                  const double* g = io->grad.data();
                  for (std::size_t i = 0; i < plane_size; ++i)
                      ga[plane * plane_size + i] += g[i];
              });
    return out;
}

Tensor rotate_rows(const Tensor& a, int shift) {
    check_rank2("rotate_rows", a);
    const int rows = a.shape()[0], d = a.shape()[1];
    const int s = ((shift % rows) + rows) % rows;
    std::vector<double> out_data(a.numel());
    const double* ad = a.data().data();
    for (int i = 0; i < rows; ++i) {
        const int src = (i + s) % rows;
        std::copy(ad + static_cast<std::size_t>(src) * d,
                  ad + static_cast<std::size_t>(src + 1) * d,
                  out_data.begin() + static_cast<std::size_t>(i) * d);
    }
    Tensor out(a.shape(), std::move(out_data), a.requires_grad());
    record_op("rotate_rows", {a}, {out},
              [ia = a.impl(), io = out.impl(), rows, d, s] {
                  if (io->grad.empty() || !ia->requires_grad) return;
                  double* ga = ensure_grad(ia);
                  const double* g = io->grad.data();
                  for (int i = 0; i < rows; ++i) {
                      const int src = (i + s) % rows;
                      for (int c = 0; c < d; ++c)
                          ga[static_cast<std::size_t>(src) * d + c] +=
                              g[static_cast<std::size_t>(i) * d + c];
                  }
              });
    return out;
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
    if (rows.empty())
        throw std::invalid_argument("stack_rows: no rows given");
    const int d = rows.front().shape().back();
    std::vector<double> out_data;
    out_data.reserve(rows.size() * static_cast<std::size_t>(d));
    bool needs_grad = false;
    for (const Tensor& r : rows) {
        if (r.rank() != 2 || r.shape()[0] != 1 || r.shape()[1] != d)
            throw std::invalid_argument(
                "stack_rows: every row must have shape (1 x d)");
        out_data.insert(out_data.end(), r.data().begin(), r.data().end());
        needs_grad = needs_grad || r.requires_grad();
    }
    Tensor out({static_cast<int>(rows.size()), d}, std::move(out_data),
               needs_grad);
    std::vector<std::shared_ptr<TensorImpl>> impls;
    impls.reserve(rows.size());
    for (const Tensor& r : rows) impls.push_back(r.impl());
    record_op("stack_rows", rows, {out},
              [impls = std::move(impls), io = out.impl(), d] {
                  if (io->grad.empty()) return;
                  const double* g = io->grad.data();
                  for (std::size_t i = 0; i < impls.size(); ++i) {
                      if (!impls[i]->requires_grad) continue;
                      impls[i]->accumulate_grad(
                          g + i * static_cast<std::size_t>(d),
                          static_cast<std::size_t>(d));
                  }
              });
    return out;
}

Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids,
                        const std::vector<std::uint8_t>& mask) {
    check_rank2("embedding_lookup", table);
    if (ids.size() != mask.size())
        throw std::invalid_argument("embedding_lookup: ids/mask length mismatch");
    const int vocab = table.shape()[0], d = table.shape()[1];
    std::vector<double> out_data(ids.size() * static_cast<std::size_t>(d), 0.0);
    const double* td = table.data().data();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!mask[i]) continue;
        if (ids[i] < 0 || ids[i] >= vocab)
            throw std::invalid_argument("unknown token: id " +
                                        std::to_string(ids[i]) +
                                        " >= vocab size " +
                                        std::to_string(vocab));
        std::copy(td + static_cast<std::size_t>(ids[i]) * d,
                  td + static_cast<std::size_t>(ids[i] + 1) * d,
                  out_data.begin() + i * static_cast<std::size_t>(d));
    }
    Tensor out({static_cast<int>(ids.size()), d}, std::move(out_data),
               table.requires_grad());
    record_op("embedding_lookup", {table}, {out},
              [it = table.impl(), io = out.impl(), ids, mask, d] {
                  if (io->grad.empty() || !it->requires_grad) return;
                  double* gt = ensure_grad(it);
                  const double* g = io->grad.data();
                  for (std::size_t i = 0; i < ids.size(); ++i) {
                      if (!mask[i]) continue;
                      for (int c = 0; c < d; ++c)
                          gt[static_cast<std::size_t>(ids[i]) * d + c] +=
                              g[i * static_cast<std::size_t>(d) + c];
                  }
              });
    return out;
}

ComplexTensor complex_mul(const ComplexTensor& a, const ComplexTensor& b) {
    Tensor re = sub(mul(a.re, b.re), mul(a.im, b.im));
    Tensor im = add(mul(a.re, b.im), mul(a.im, b.re));
    return ComplexTensor{std::move(re), std::move(im)};
}

Tensor abs_sq(const ComplexTensor& a) {
    if (a.re.shape() != a.im.shape())
        throw std::invalid_argument("abs_sq: re/im shape mismatch");
    std::vector<double> out_data(a.re.numel());
    const double* re = a.re.data().data();
    const double* im = a.im.data().data();
    for (std::size_t i = 0; i < out_data.size(); ++i)
        out_data[i] = re[i] * re[i] + im[i] * im[i];
    Tensor out(a.re.shape(), std::move(out_data),
               any_requires({a.re, a.im}));
    record_op("abs_sq", {a.re, a.im}, {out},
              [ire = a.re.impl(), iim = a.im.impl(), io = out.impl()] {
                  if (io->grad.empty()) return;
                  const double* g = io->grad.data();
                  if (ire->requires_grad) {
                      double* gr = ensure_grad(ire);
                      for (std::size_t i = 0; i < io->data.size(); ++i)
                          gr[i] += 2.0 * ire->data[i] * g[i];
                  }
                  if (iim->requires_grad) {
                      double* gi = ensure_grad(iim);
                      for (std::size_t i = 0; i < io->data.size(); ++i)
                          gi[i] += 2.0 * iim->data[i] * g[i];
                  }
              });
    return out;
}

}  // namespace fsru
