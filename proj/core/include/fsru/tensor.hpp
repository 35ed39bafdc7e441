#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fsru/rng.hpp"

namespace fsru {

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

// Storage shared by all Tensor handles pointing at the same value.
// Data is immutable once the forward op that produced it has run; only the
// gradient buffer accumulates afterwards. Parameters are additionally
// updated in place by the optimizer between steps.
struct TensorImpl {
    std::vector<int> shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;  // empty until the backward pass touches it

    void accumulate_grad(const double* g, std::size_t count);
};

// Rank <= 3 row-major array of 64-bit floats. Copying a Tensor copies the
// handle, not the storage.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<int> shape, std::vector<double> data,
           bool requires_grad = false);

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor ones(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, double value);
    static Tensor scalar(double value);
    static Tensor uniform(std::vector<int> shape, double lo, double hi,
                          Rng& rng, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const std::vector<int>& shape() const { return impl_->shape; }
    int rank() const { return static_cast<int>(impl_->shape.size()); }
    std::size_t numel() const { return impl_->data.size(); }
    std::span<const double> data() const { return impl_->data; }
    // In-place access, for parameter updates and test perturbations only.
    std::span<double> mutable_data() { return impl_->data; }

    bool requires_grad() const { return impl_->requires_grad; }
    Tensor& set_requires_grad(bool v) {
        impl_->requires_grad = v;
        return *this;
    }
    bool has_grad() const { return !impl_->grad.empty(); }
    std::span<const double> grad() const { return impl_->grad; }
    void zero_grad();

    double item() const;  // requires numel() == 1
    double at(std::initializer_list<int> index) const;

    const std::shared_ptr<TensorImpl>& impl() const { return impl_; }

private:
    std::shared_ptr<TensorImpl> impl_;
};

// Complex values are carried as an (re, im) pair of equal-shape real
// tensors; differentiation treats the two parts as independent leaves.
struct ComplexTensor {
    Tensor re;
    Tensor im;
};

ComplexTensor make_complex(Tensor re, Tensor im);
ComplexTensor complex_from_real(const Tensor& re);

}  // namespace fsru
