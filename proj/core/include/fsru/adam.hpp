#pragma once

#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam(std::vector<Tensor> parameters, AdamConfig config);

    // Applies one update from the accumulated gradients; parameters without
    // a gradient buffer are left unchanged.
    void step();
    void zero_grad();
    long step_count() const { return step_count_; }

private:
    std::vector<Tensor> parameters_;
    std::vector<std::vector<double>> first_moment_;
    std::vector<std::vector<double>> second_moment_;
    AdamConfig config_;
    long step_count_ = 0;
};

}  // namespace fsru
