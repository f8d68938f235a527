#pragma once

#include <string>
#include <vector>

#include "curvesearch/config.hpp"

namespace curvesearch {

/// Hyperparameters of one experiment task. "paper/<task>-d<d>" presets copy
/// the published tables; "desk/..." presets are rescaled for desk runs.
struct Preset {
  std::string name;
  ObjectiveConfig objective;
  std::vector<AlgorithmEntry> algorithms;  // max_iters left unset
};

const std::vector<Preset>& presets();
// Throws ConfigError listing the known names when `name` is unknown.
const Preset& find_preset(const std::string& name);
// Entry of a preset for `algorithm`, preferring the one labelled `label`.
// ConfigError when the preset has no entry for the algorithm.
const AlgorithmEntry& preset_algorithm(const Preset& preset, Algorithm algorithm, const std::string& label = "");

// Config running every algorithm of the preset on `seeds`.
ExperimentConfig config_from_preset(const std::string& name, const std::vector<std::uint64_t>& seeds, int max_iters);

}  // namespace curvesearch
