#include "fsru/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace fsru {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int e : shape) {
        if (e < 0) throw std::invalid_argument("tensor: negative extent");
        n *= static_cast<std::size_t>(e);
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

void TensorImpl::accumulate_grad(const double* g, std::size_t count) {
    if (grad.empty()) grad.assign(data.size(), 0.0);
    for (std::size_t i = 0; i < count; ++i) grad[i] += g[i];
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data,
               bool requires_grad) {
    if (shape.size() > 3)
        throw std::invalid_argument("tensor: rank > 3 not supported");
    if (shape_numel(shape) != data.size())
        throw std::invalid_argument("tensor: shape " + shape_str(shape) +
                                    " does not match data length " +
                                    std::to_string(data.size()));
    impl_ = std::make_shared<TensorImpl>();
    impl_->shape = std::move(shape);
    impl_->data = std::move(data);
    impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    std::vector<double> data(shape_numel(shape), 0.0);
    return Tensor(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::ones(std::vector<int> shape, bool requires_grad) {
    std::vector<double> data(shape_numel(shape), 1.0);
    return Tensor(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    std::vector<double> data(shape_numel(shape), value);
    return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::uniform(std::vector<int> shape, double lo, double hi, Rng& rng,
                       bool requires_grad) {
    std::vector<double> data(shape_numel(shape));
    for (double& v : data) v = rng.uniform(lo, hi);
    return Tensor(std::move(shape), std::move(data), requires_grad);
}

void Tensor::zero_grad() {
    if (!impl_->grad.empty())
        std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

double Tensor::item() const {
    if (numel() != 1)
        throw std::invalid_argument("tensor: item() requires a single element");
    return impl_->data[0];
}

double Tensor::at(std::initializer_list<int> index) const {
    const auto& shape = impl_->shape;
    if (index.size() != shape.size())
        throw std::invalid_argument("tensor: index rank mismatch");
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (int i : index) {
        if (i < 0 || i >= shape[axis])
            throw std::out_of_range("tensor: index out of range");
        flat = flat * static_cast<std::size_t>(shape[axis]) +
               static_cast<std::size_t>(i);
        ++axis;
    }
    return impl_->data[flat];
}

ComplexTensor make_complex(Tensor re, Tensor im) {
    if (re.shape() != im.shape())
        throw std::invalid_argument("complex tensor: re/im shape mismatch " +
                                    shape_str(re.shape()) + " vs " +
                                    shape_str(im.shape()));
    return ComplexTensor{std::move(re), std::move(im)};
}

ComplexTensor complex_from_real(const Tensor& re) {
    return ComplexTensor{re, Tensor::zeros(re.shape())};
}

}  // namespace fsru
