#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsru/dataset.hpp"
#include "fsru/model.hpp"
#include "fsru/train.hpp"

namespace fsru {

// Flat run configuration shared by every CLI subcommand. Serialized as a
// JSON object with the same field names; any field can be overridden with
// --set key=value.
struct RunConfig {
    // dimensions
    int d = 32;          // embedding dimension
    int m = 32;          // text token length
    int grid_h = 4;      // image patch grid; n = grid_h * grid_w
    int grid_w = 4;
    int patch_size = 4;
    int vocab_size = 64;
    // model
    int k = 2;  // USC filter count
    std::string mixer = "spectral";
    bool usc = true;
    bool csc = true;
    bool dsf = true;
    bool cl = true;
    bool csc_full_conv = false;
    bool literal_eq10 = false;
    double alpha = 0.2;
    double beta = 0.2;
    double tau = 0.1;
    // training
    double lr = 1e-3;
    int batch_size = 64;
    int epochs = 50;
    std::uint64_t seed = 42;
    int folds = 1;
    // synthetic data
    int count = 1200;
    double balance = 0.5;
    double noise = 0.25;
    double consistency = 1.0;
    std::vector<int> text_bands_rumor = {2, 3};
    std::vector<int> text_bands_nonrumor = {6, 9, 12};
    std::vector<int> image_bands_rumor = {2};
    std::vector<int> image_bands_nonrumor = {5, 7};

    ModelConfig model_config() const;
    TrainConfig train_config() const;
    SyntheticSpec synthetic_spec() const;
};

// Loads defaults, overlays the JSON file at `path` (if non-empty), then
// applies "key=value" overrides. Unknown keys and malformed values throw
// std::invalid_argument (a usage error).
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides);

std::string run_config_json(const RunConfig& config);

}  // namespace fsru
