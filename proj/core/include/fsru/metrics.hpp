#pragma once

#include <vector>

namespace fsru {

// Class 1 ("rumor") is the positive class of the confusion counts.
struct ConfusionCounts {
    long true_positive = 0;
    long false_positive = 0;
    long true_negative = 0;
    long false_negative = 0;
};

struct Metrics {
    double accuracy = 0.0;
    double precision_rumor = 0.0;
    double recall_rumor = 0.0;
    double f1_rumor = 0.0;
    double precision_nonrumor = 0.0;
    double recall_nonrumor = 0.0;
    double f1_nonrumor = 0.0;
    ConfusionCounts confusion;
};

// Ratios with an empty denominator are reported as 0.
Metrics compute_metrics(const std::vector<int>& predictions,
                        const std::vector<int>& labels);

}  // namespace fsru
