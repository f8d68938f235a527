#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvesearch/core_math.hpp"

namespace curvesearch {

// One row per iteration; row 0 is the starting point.
struct TraceRow {
  std::int64_t iter = 0;
  std::int64_t evals = 0;  // cumulative objective evaluations since run start
  std::int64_t elapsed_ns = 0;
  double f = 0.0;
  std::optional<double> grad_norm;
};

struct TraceMeta {
  std::string algorithm;
  std::string objective;
  int d = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::optional<double> f_star;
};

struct RunTrace {
  TraceMeta meta;
  std::vector<TraceRow> rows;
  Vector final_x;
  // Algorithm-specific counters, e.g. "ahds.eigensolver_failures".
  std::map<std::string, std::int64_t> diagnostics;
};

}  // namespace curvesearch
