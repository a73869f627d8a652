#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "prism/trainer.hpp"

namespace prism {

/// Flat `key = value` run description. `#` starts a comment; unknown keys and
/// malformed values are rejected with the line number.
///
///   learning_rate epochs batch_size seed val_fraction huber_delta threads
///   record_wall_time augmentation(none|random-rotation)
///   dim layers rbf_centers r_c R_c r_f max_degree direction_features
///   expert_atomistic expert_similarity expert_multiscale expert_cell
///   data checkpoint log
struct RunConfig {
  TrainConfig train;
  std::string data;        // input structures (JSON-lines)
  std::string checkpoint;  // checkpoint output
  std::string log;         // epoch log CSV output
};

/// Throws ConfigError; the result is validated (r_c > 0, R_c > r_c, r_f > 0, ...).
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment. Throws ConfigError for unknown keys.
void set_run_config_value(RunConfig& config, const std::string& key, const std::string& value);

std::string run_config_to_string(const RunConfig& config);

}  // namespace prism
