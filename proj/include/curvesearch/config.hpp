#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvesearch/search.hpp"

namespace curvesearch {

struct ObjectiveConfig {
  std::string name;  // quartic, rastrigin, leading-eig, quadratic-saddle
  int d = 0;
  // rastrigin: explicit nonzero coordinates, or `saddle_coords` of them drawn
  // from matrix_seed.
  std::vector<int> saddle_indices;
  int saddle_coords = 1;
  // leading-eig matrix, rastrigin coordinate draw, quadratic-saddle rotation.
  std::uint64_t matrix_seed = 0;
  std::vector<double> eigenvalues;  // quadratic-saddle
  bool rotate = false;              // quadratic-saddle
};

struct AlgorithmEntry {
  std::string label;  // trace "algo" column; defaults to the algorithm name
  AlgorithmSpec spec;
  std::optional<int> max_iters;  // overrides ExperimentConfig::max_iters
};

struct ExperimentConfig {
  ObjectiveConfig objective;
  std::vector<AlgorithmEntry> algorithms;
  std::vector<std::uint64_t> seeds;
  int max_iters = 0;
  bool record_grad_norm = true;
  bool record_time = true;
  std::string output_path;          // trace CSV; empty = not written
  std::string summary_path;         // per-iteration summary CSV
  std::string time_summary_path;    // per-time-bucket summary CSV
  std::int64_t time_bucket_ns = 0;  // required with time_summary_path
  std::vector<int> sweep_dims;      // used by the sweep command
};

// JSON forms of the algorithm blocks. Fields present in the input override
// those from a referenced preset.
nlohmann::json to_json(const ScheduleConfig& s);
nlohmann::json to_json(const DfpiConfig& c);
nlohmann::json to_json(const BaselineConfig& b);
nlohmann::json to_json(const AlgorithmSpec& spec);

// Parses and validates a config document. Every problem is reported at once
// through ConfigError, each prefixed with its field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// Re-validates a config built in code (same checks as parse_config).
void validate(const ExperimentConfig& cfg);

// Stable 64-bit FNV-1a hash (hex) of the canonical JSON of an algorithm entry
// and the objective.
std::string config_hash(const ObjectiveConfig& objective, const AlgorithmEntry& entry);

nlohmann::json to_json(const ObjectiveConfig& o);

}  // namespace curvesearch
