#include "curvesearch/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <mutex>
#include <sstream>

#include "curvesearch/errors.hpp"
#include "parallel.hpp"

namespace curvesearch {

namespace {

// Stream ids keep the instance draws apart from each other and from run seeds.
constexpr std::uint64_t kRastriginStream = 1;
constexpr std::uint64_t kLeadingEigStream = 2;
constexpr std::uint64_t kRotationStream = 3;

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

SummaryRow band(std::int64_t index, std::vector<double>& gaps) {
  SummaryRow row;
  row.index = index;
  row.gap_min = *std::min_element(gaps.begin(), gaps.end());
  row.gap_max = *std::max_element(gaps.begin(), gaps.end());
  row.gap_med = median_of(gaps);
  return row;
}

Summary summary_header(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw InvalidArgument("aggregate: no traces");
  const auto& m = traces.front().meta;
  for (const auto& t : traces) {
    if (t.meta.algorithm != m.algorithm || t.meta.objective != m.objective || t.meta.d != m.d) {
      throw InvalidArgument("aggregate: mixed keys (" + m.algorithm + ", " + m.objective + ", " + std::to_string(m.d) +
                            ") and (" + t.meta.algorithm + ", " + t.meta.objective + ", " + std::to_string(t.meta.d) +
                            ")");
    }
    if (!t.meta.f_star) throw InvalidArgument("aggregate: objective '" + t.meta.objective + "' has no known optimum");
    if (t.rows.empty()) throw InvalidArgument("aggregate: empty trace");
  }
  Summary s;
  s.algorithm = m.algorithm;
  s.objective = m.objective;
  s.d = m.d;
  return s;
}

template <class Fn>
std::vector<Summary> grouped(const std::vector<RunTrace>& traces, Fn&& fn) {
  std::vector<std::vector<RunTrace>> groups;
  for (const auto& t : traces) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      const auto& m = g.front().meta;
      return m.algorithm == t.meta.algorithm && m.objective == t.meta.objective && m.d == t.meta.d;
    });
    if (it == groups.end()) {
      groups.push_back({t});
    } else {
      it->push_back(t);
    }
  }
  std::vector<Summary> out;
  for (const auto& g : groups) out.push_back(fn(g));
  return out;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

void substitute_d(nlohmann::json& j, const std::string& d) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    replace_all(s, "{d}", d);
    j = s;
  } else if (j.is_structured()) {
    for (auto& v : j) substitute_d(v, d);
  }
}

}  // namespace

Instance make_instance(const ObjectiveConfig& cfg) {
  if (cfg.name == "quartic") return {quartic_saddle(cfg.d), Vector::Zero(cfg.d + 1), {}};
  if (cfg.name == "rastrigin") {
    Objective f = rastrigin(cfg.d);
    if (!cfg.saddle_indices.empty()) {
      return {std::move(f), rastrigin_saddle_init(cfg.d, cfg.saddle_indices), cfg.saddle_indices};
    }
    Rng rng(cfg.matrix_seed, kRastriginStream);
    std::vector<int> chosen;
    Vector x0 = rastrigin_saddle_init(cfg.d, cfg.saddle_coords, rng, &chosen);
    return {std::move(f), std::move(x0), std::move(chosen)};
  }
  if (cfg.name == "leading-eig") {
    Rng rng(cfg.matrix_seed, kLeadingEigStream);
    LeadingEigProblem p = leading_eig(cfg.d, rng);
    return {std::move(p.objective), std::move(p.saddle_init), {}};
  }
  if (cfg.name == "quadratic-saddle") {
    QuadraticSaddleSpec spec;
    spec.eigenvalues = cfg.eigenvalues;
    if (cfg.rotate) {
      Rng rng(cfg.matrix_seed, kRotationStream);
      spec.rotation = random_orthogonal(rng, static_cast<int>(cfg.eigenvalues.size()));
    }
    Objective f = quadratic_saddle(spec);
    const int dim = f.dim();
    return {std::move(f), Vector::Zero(dim), {}};
  }
  throw ConfigError({"objective.name: unknown objective '" + cfg.name + "'"});
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("CURVESEARCH_THREADS"); env && *env) {
    int n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc() || ptr != end || n < 1) {
      throw ConfigError({std::string("CURVESEARCH_THREADS: expected a positive integer, got '") + env + "'"});
    }
    return n;
  }
  return std::max(requested, 1);
}

std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts) {
  validate(cfg);
  const Instance instance = make_instance(cfg.objective);
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t total = cfg.algorithms.size() * n_seeds;
  std::vector<RunTrace> traces(total);
  std::mutex progress_mu;
  std::size_t done = 0;

  detail::parallel_for(total, opts.threads, [&](std::size_t cell) {
    const AlgorithmEntry& entry = cfg.algorithms[cell / n_seeds];
    const std::uint64_t seed = cfg.seeds[cell % n_seeds];
    AlgorithmSpec spec = entry.spec;
    const int iters = entry.max_iters.value_or(cfg.max_iters);
    if (spec.schedule) spec.schedule->max_iters = iters;
    if (spec.baseline) spec.baseline->max_iters = iters;

    Objective f = instance.objective;
    f.reset_eval_count();
    Rng rng(seed);
    RunOptions ro;
    ro.record_grad_norm = cfg.record_grad_norm;
    ro.record_time = cfg.record_time;
    ro.seed = seed;
    try {
      RunTrace t = run(spec, f, instance.x0, rng, ro);
      t.meta.algorithm = entry.label;
      t.meta.config_hash = config_hash(cfg.objective, entry);
      traces[cell] = std::move(t);
    } catch (const std::exception& e) {
      throw Error("run failed (algorithm '" + entry.label + "', seed " + std::to_string(seed) + "): " + e.what());
    }
    if (opts.progress) {
      std::lock_guard<std::mutex> lock(progress_mu);
      opts.progress(++done, total);
    }
  });
  return traces;
}

nlohmann::json sweep_document_for(const nlohmann::json& doc, int d) {
  nlohmann::json out = doc;
  out.erase("sweep_dims");
  substitute_d(out, std::to_string(d));
  if (out.contains("objective") && out["objective"].is_object()) out["objective"]["d"] = d;
  return out;
}

std::vector<RunTrace> run_sweep(const nlohmann::json& doc, const ExperimentOptions& opts) {
  std::vector<int> dims;
  if (doc.is_object() && doc.contains("sweep_dims") && doc["sweep_dims"].is_array()) {
    for (const auto& v : doc["sweep_dims"]) {
      if (!v.is_number_integer() || v.get<int>() < 1) {
        throw ConfigError({"sweep_dims: must be a non-empty array of positive integers"});
      }
      dims.push_back(v.get<int>());
    }
  }
  if (dims.empty()) throw ConfigError({"sweep_dims: required for a sweep"});
  // Validate every substituted document before running any of them.
  std::vector<ExperimentConfig> cfgs;
  for (int d : dims) cfgs.push_back(parse_config(sweep_document_for(doc, d)));
  std::vector<RunTrace> all;
  for (const auto& cfg : cfgs) {
    auto traces = run_experiment(cfg, opts);
    for (auto& t : traces) all.push_back(std::move(t));
  }
  return all;
}

Summary aggregate(const std::vector<RunTrace>& traces) {
  Summary s = summary_header(traces);
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.rows.size());
  std::vector<double> gaps;
  for (std::size_t i = 0; i < longest; ++i) {
    gaps.clear();
    for (const auto& t : traces) {
      if (i < t.rows.size()) gaps.push_back(t.rows[i].f - *t.meta.f_star);
    }
    s.rows.push_back(band(static_cast<std::int64_t>(i), gaps));
  }
  return s;
}

Summary aggregate_by_time(const std::vector<RunTrace>& traces, std::int64_t bucket_ns) {
  if (bucket_ns < 1) throw InvalidArgument("aggregate_by_time: bucket width must be positive");
  Summary s = summary_header(traces);
  s.by_time = true;
  std::int64_t last = 0;
  for (const auto& t : traces) last = std::max(last, t.rows.back().elapsed_ns);
  std::vector<double> gaps;
  for (std::int64_t end = bucket_ns;; end += bucket_ns) {
    gaps.clear();
    for (const auto& t : traces) {
      double best = 0.0;
      bool seen = false;
      for (const auto& r : t.rows) {
        if (r.elapsed_ns > end) break;
        best = seen ? std::min(best, r.f) : r.f;
        seen = true;
      }
      if (seen) gaps.push_back(best - *t.meta.f_star);
    }
    if (!gaps.empty()) s.rows.push_back(band(end, gaps));
    if (end >= last) break;
  }
  return s;
}

std::vector<Summary> aggregate_groups(const std::vector<RunTrace>& traces) {
  return grouped(traces, [](const std::vector<RunTrace>& g) { return aggregate(g); });
}

std::vector<Summary> aggregate_groups_by_time(const std::vector<RunTrace>& traces, std::int64_t bucket_ns) {
  return grouped(traces, [bucket_ns](const std::vector<RunTrace>& g) { return aggregate_by_time(g, bucket_ns); });
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<RunTrace>& traces) {
  if (!cfg.output_path.empty()) {
    std::ostringstream out;
    write_traces_csv(out, traces);
    write_text_file(cfg.output_path, out.str());
  }
  if (!cfg.summary_path.empty()) {
    std::ostringstream out;
    write_summaries_csv(out, aggregate_groups(traces));
    write_text_file(cfg.summary_path, out.str());
  }
  if (!cfg.time_summary_path.empty()) {
    std::ostringstream out;
    write_summaries_csv(out, aggregate_groups_by_time(traces, cfg.time_bucket_ns));
    write_text_file(cfg.time_summary_path, out.str());
  }
}

}  // namespace curvesearch
