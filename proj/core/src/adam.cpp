#include "fsru/adam.hpp"

#include <cmath>

namespace fsru {

Adam::Adam(std::vector<Tensor> parameters, AdamConfig config)
    : parameters_(std::move(parameters)), config_(config) {
    first_moment_.reserve(parameters_.size());
    second_moment_.reserve(parameters_.size());
    for (const Tensor& p : parameters_) {
        first_moment_.emplace_back(p.numel(), 0.0);
        second_moment_.emplace_back(p.numel(), 0.0);
    }
}

void Adam::step() {
    ++step_count_;
    const double bias1 = 1.0 - std::pow(config_.beta1, step_count_);
    const double bias2 = 1.0 - std::pow(config_.beta2, step_count_);
    for (std::size_t p = 0; p < parameters_.size(); ++p) {
        if (!parameters_[p].has_grad()) continue;
        auto grad = parameters_[p].grad();
        auto data = parameters_[p].mutable_data();
        auto& m = first_moment_[p];
        auto& v = second_moment_[p];
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double g = grad[i];
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            data[i] -= config_.learning_rate * m_hat /
                       (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

void Adam::zero_grad() {
    for (Tensor& p : parameters_) p.zero_grad();
}

}  // namespace fsru
