#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsru/model.hpp"

namespace fsru {

// Planted-frequency generator: class-1 ("rumor") samples concentrate signal
// energy in a few designated bins, class-0 samples spread theirs over a
// wider disjoint set. Token sequences and patch grids are inverse transforms
// of the planted spectra plus noise.
struct SyntheticSpec {
    int sample_count = 1000;
    double class_balance = 0.5;  // fraction of class-1 samples
    std::vector<int> text_bands_rumor = {2, 3};
    std::vector<int> text_bands_nonrumor = {6, 9, 12};
    std::vector<int> image_bands_rumor = {2};
    std::vector<int> image_bands_nonrumor = {5, 7};
    double noise = 0.25;
    double consistency = 1.0;  // probability the image carries the label's bands

    int text_len = 32;
    int grid_h = 4;
    int grid_w = 4;
    int patch_size = 4;
    int vocab_size = 64;

    int patch_count() const { return grid_h * grid_w; }
};

struct Dataset {
    int text_len = 0;
    int grid_h = 0;
    int grid_w = 0;
    int patch_size = 0;
    int vocab_size = 0;
    std::vector<Sample> samples;
};

// One record per line: label, TAB, space-separated token ids, TAB,
// base64-encoded little-endian f64 patch grid. A "# fsru-dataset v1 ..."
// header line carries the dimensions.
std::string render_dataset(const Dataset& dataset);
Dataset parse_dataset(const std::string& text);

Dataset generate_dataset(const SyntheticSpec& spec, std::uint64_t seed);
// Renders and writes atomically; byte-identical for a fixed (spec, seed).
void generate(const SyntheticSpec& spec, std::uint64_t seed,
              const std::string& path);
Dataset load_dataset(const std::string& path);

// Classifies each sample by comparing planted-band energies of the raw
// token-id sequence and the per-patch pixel means; returns its accuracy.
// This is a data-separability check, independent of the model.
double threshold_oracle_accuracy(const Dataset& dataset,
                                 const SyntheticSpec& spec);

namespace base64 {
std::string encode(const std::vector<double>& values);
std::vector<double> decode(const std::string& text);
}  // namespace base64

}  // namespace fsru
