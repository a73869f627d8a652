#pragma once

#include <filesystem>
#include <string>

#include "prism/model.hpp"

namespace prism {

// Checkpoint layout (JSON, keys sorted, doubles printed round-trip exact):
//
//   {
//     "format": "prism-checkpoint", "version": 1,
//     "config": { "dim": 16, "layers": 2, ..., "experts": {"atomistic": true, ...} },
//     "normalizer": { "mean": 0.0, "scale": 1.0 },
//     "params": { "<dotted.name>": { "shape": [rows, cols], "data": [row-major] }, ... }
//   }
//
// Loading rebuilds the parameter layout from "config" and requires that every
// named array is present with the declared shape and no extra names exist.

inline constexpr int kCheckpointVersion = 1;

std::string checkpoint_to_string(const PrismModel& model);
PrismModel checkpoint_from_string(const std::string& text);

void save_checkpoint(const PrismModel& model, const std::filesystem::path& path);
PrismModel load_checkpoint(const std::filesystem::path& path);

}  // namespace prism
