#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fsru/adam.hpp"
#include "fsru/dataset.hpp"
#include "fsru/metrics.hpp"
#include "fsru/model.hpp"

namespace fsru {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 64;
    std::uint64_t seed = 42;
    AdamConfig adam;
};

// Raised when a training step produces a non-finite loss; `diagnostic`
// carries a dump of the offending batch.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(int epoch, int batch_index, std::string diagnostic)
        : std::runtime_error("non-finite loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index)),
          epoch(epoch),
          batch_index(batch_index),
          diagnostic(std::move(diagnostic)) {}

    int epoch;
    int batch_index;
    std::string diagnostic;
};

struct EvalResult {
    Metrics metrics;
    LossReport report;
    std::vector<int> predictions;
};

struct EpochStats {
    int epoch = 0;
    LossReport train_report;
    Metrics train_metrics;
    LossReport test_report;
    Metrics test_metrics;
};

struct TrainResult {
    std::vector<EpochStats> history;
    Metrics final_test;
    std::string metrics_csv;      // per-epoch lines, train and test splits
    std::string convergence_csv;  // epoch, mixer_kind, train_loss, test_accuracy

    // First epoch (1-based) whose test accuracy reaches `bar`, or -1.
    int epochs_to_accuracy(double bar) const;
};

// Inference pass; loss terms are batch-size-weighted means.
EvalResult evaluate_model(const Model& model, const Dataset& dataset,
                          int batch_size = 64);

TrainResult train_model(Model& model, const Dataset& train_set,
                        const Dataset& test_set, const TrainConfig& config);

// Deterministic shuffle-then-stripe split for k-fold runs; fold_index picks
// the held-out part.
std::pair<Dataset, Dataset> fold_split(const Dataset& dataset, int folds,
                                       int fold_index, std::uint64_t seed);

std::string metrics_csv_header();

}  // namespace fsru
