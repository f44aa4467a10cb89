#ifndef FGPROP_CHECKPOINT_H_
#define FGPROP_CHECKPOINT_H_

#include <filesystem>

#include <nlohmann/json.hpp>

#include "fgprop/model.h"

namespace fgprop {

// Layout (little-endian):
//   8 bytes   magic "FGPCKPT\0"
//   u32       version (1)
//   u64       header length H
//   H bytes   JSON header: architecture, gate, dimension, alpha,
//             positive_weight, seed, frozen_gate, blocks [{name, count}],
//             plus caller metadata under "meta"
//   f64 x N   parameter blocks in Parameters::visit order
struct Checkpoint {
  MgnModel model;
  nlohmann::json meta = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);

// Throws fgprop::FormatError on a bad magic, unsupported version, malformed
// header, block mismatch, truncation or trailing bytes.
Checkpoint load_checkpoint(const std::filesystem::path &path);

}  // namespace fgprop

#endif  // FGPROP_CHECKPOINT_H_
