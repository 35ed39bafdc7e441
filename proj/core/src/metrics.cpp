#include "fsru/metrics.hpp"

#include <stdexcept>

namespace fsru {

namespace {
double ratio(long num, long den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}
double harmonic(double p, double r) {
    return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}
}  // namespace

Metrics compute_metrics(const std::vector<int>& predictions,
                        const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("metrics: prediction/label count mismatch");
    Metrics m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool truth = labels[i] == 1;
        const bool said = predictions[i] == 1;
        if (truth && said) ++m.confusion.true_positive;
        if (!truth && said) ++m.confusion.false_positive;
        if (!truth && !said) ++m.confusion.true_negative;
        if (truth && !said) ++m.confusion.false_negative;
    }
    const auto& c = m.confusion;
    const long total = c.true_positive + c.false_positive + c.true_negative +
                       c.false_negative;
    m.accuracy = ratio(c.true_positive + c.true_negative, total);
    m.precision_rumor = ratio(c.true_positive, c.true_positive + c.false_positive);
    m.recall_rumor = ratio(c.true_positive, c.true_positive + c.false_negative);
    m.f1_rumor = harmonic(m.precision_rumor, m.recall_rumor);
    m.precision_nonrumor =
        ratio(c.true_negative, c.true_negative + c.false_negative);
    m.recall_nonrumor =
        ratio(c.true_negative, c.true_negative + c.false_positive);
    m.f1_nonrumor = harmonic(m.precision_nonrumor, m.recall_nonrumor);
    return m;
}

}  // namespace fsru
