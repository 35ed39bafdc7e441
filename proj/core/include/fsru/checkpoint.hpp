#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

// Self-describing array container:
//   bytes 0..7   magic "FSRUCKPT"
//   bytes 8..15  little-endian u64 header byte length
//   header       UTF-8 JSON {"meta": ..., "arrays": [{name, shape, offset}]}
//                with offsets in bytes from the start of the payload
//   payload      little-endian IEEE-754 f64 values, arrays back to back
// Roundtrips are bit-exact.
struct Checkpoint {
    std::string meta_json;  // arbitrary JSON object, "{}" when unused
    std::vector<std::pair<std::string, Tensor>> arrays;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint arrays into same-named parameters; throws naming the
// offending array on a shape mismatch or a missing name.
void load_into(const Checkpoint& checkpoint,
               std::vector<std::pair<std::string, Tensor>> parameters);

// Whole-file atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace fsru
