#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curvesearch/config.hpp"
#include "curvesearch/csv.hpp"
#include "curvesearch/objectives.hpp"
#include "curvesearch/trace.hpp"

namespace curvesearch {

struct Instance {
  Objective objective;
  Vector x0;
  std::vector<int> saddle_indices;  // rastrigin only
};

// Objective and start point for a config. Deterministic in the config.
Instance make_instance(const ObjectiveConfig& cfg);

struct ExperimentOptions {
  int threads = 1;
  // Called after each finished run with (done, total); may be invoked from
  // worker threads but never concurrently.
  std::function<void(std::size_t, std::size_t)> progress;
};

// Worker count from `requested`, overridden by CURVESEARCH_THREADS when set.
int resolve_threads(int requested);

// One trace per (algorithm, seed), ordered by algorithm then seed. Each run
// uses Rng(seed) and its own copy of the objective, so results do not depend
// on the thread count. Run errors are rethrown annotated with algorithm and seed.
std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts = {});

// Runs a config document once per entry of its "sweep_dims": objective.d is
// replaced and every "{d}" inside string values (e.g. preset names) is
// substituted before parsing. Traces are concatenated in dimension order.
std::vector<RunTrace> run_sweep(const nlohmann::json& doc, const ExperimentOptions& opts = {});
nlohmann::json sweep_document_for(const nlohmann::json& doc, int d);

// min / median / max of f - f_star per iteration. All traces must share
// (algorithm, objective, d); traces of different lengths contribute to the
// indices they reach.
Summary aggregate(const std::vector<RunTrace>& traces);
// Same over wall-clock buckets [0, w), [w, 2w), ... each trace contributing
// its best value recorded by the bucket end.
Summary aggregate_by_time(const std::vector<RunTrace>& traces, std::int64_t bucket_ns);
// Groups by (algorithm, objective, d) in first-appearance order.
std::vector<Summary> aggregate_groups(const std::vector<RunTrace>& traces);
std::vector<Summary> aggregate_groups_by_time(const std::vector<RunTrace>& traces, std::int64_t bucket_ns);

// Writes the CSV outputs named in cfg.
void write_outputs(const ExperimentConfig& cfg, const std::vector<RunTrace>& traces);

}  // namespace curvesearch
