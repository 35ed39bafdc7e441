#pragma once

#include <string>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

struct Projection {
    std::vector<double> x;
    std::vector<double> y;
    bool degenerate = false;  // covariance had no usable variance
};

// Projects the rows of features (B x d) onto their top-2 principal
// components (Jacobi eigensolver on the covariance). A degenerate
// covariance yields all-zero coordinates and sets the flag.
Projection project_features(const Tensor& features);

// x,y,label rows, one per sample.
std::string projection_csv(const Projection& projection,
                           const std::vector<int>& labels);

}  // namespace fsru
