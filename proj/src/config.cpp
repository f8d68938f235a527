#include "curvesearch/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "curvesearch/errors.hpp"
#include "curvesearch/presets.hpp"

namespace curvesearch {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

// Non-negative integer, whether the JSON value was built signed or unsigned.
bool is_seed(const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); }

const std::set<std::string> kObjectiveNames = {"quartic", "rastrigin", "leading-eig", "quadratic-saddle"};

// Collects problems while reading one JSON object.
class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) error("", "must be an object");
  }

  bool ok() const { return j_.is_object(); }
  bool has(const char* key) const { return ok() && j_.contains(key) && !j_.at(key).is_null(); }
  std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& at(const char* key) const { return j_.at(key); }

  void error(const char* key, const std::string& what) {
    const std::string p = key[0] ? path(key) : path_;
    errors_.push_back((p.empty() ? std::string("<root>") : p) + ": " + what);
  }

  void reject_unknown(const std::set<std::string>& allowed) {
    if (!ok()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) error(k.c_str(), "unknown field");
    }
  }

  std::optional<double> number(const char* key, bool required) {
    if (!has(key)) {
      if (required && ok()) error(key, "missing required field");
      return std::nullopt;
    }
    const json& v = at(key);
    if (!v.is_number()) {
      error(key, "must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      error(key, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<double> positive(const char* key, bool required) {
    auto x = number(key, required);
    if (x && !(*x > 0.0)) {
      error(key, "must be > 0");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::int64_t> integer(const char* key, bool required, std::int64_t min_value) {
    if (!has(key)) {
      if (required && ok()) error(key, "missing required field");
      return std::nullopt;
    }
    const json& v = at(key);
    if (!v.is_number_integer()) {
      error(key, "must be an integer");
      return std::nullopt;
    }
    const auto x = v.get<std::int64_t>();
    if (x < min_value) {
      error(key, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<bool> boolean(const char* key) {
    if (!has(key)) return std::nullopt;
    if (!at(key).is_boolean()) {
      error(key, "must be true or false");
      return std::nullopt;
    }
    return at(key).get<bool>();
  }

  std::optional<std::string> string(const char* key, bool required) {
    if (!has(key)) {
      if (required && ok()) error(key, "missing required field");
      return std::nullopt;
    }
    if (!at(key).is_string()) {
      error(key, "must be a string");
      return std::nullopt;
    }
    return at(key).get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
};

ScheduleConfig parse_schedule(const json& j, const std::string& path, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.reject_unknown({"sigma1", "sigma2", "rho", "t_sigma1"});
  ScheduleConfig s;
  if (auto v = r.positive("sigma1", true)) s.sigma1 = *v;
  if (auto v = r.positive("sigma2", true)) s.sigma2 = *v;
  if (auto v = r.number("rho", false)) {
    if (*v > 0.0 && *v <= 1.0) {
      s.rho = *v;
    } else {
      r.error("rho", "must lie in (0, 1]");
    }
  }
  if (auto v = r.integer("t_sigma1", false, 1)) s.t_sigma1 = static_cast<int>(*v);
  return s;
}

DfpiConfig parse_dfpi(const json& j, const std::string& path, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.reject_unknown({"c", "r", "eta", "t_dfpi", "estimator", "shared_delta"});
  DfpiConfig c;
  if (auto v = r.positive("c", false)) c.c = *v;
  if (auto v = r.positive("r", false)) c.r = *v;
  if (auto v = r.positive("eta", false)) c.eta = *v;
  if (auto v = r.integer("t_dfpi", false, 0)) c.t_dfpi = static_cast<int>(*v);
  if (auto v = r.string("estimator", false)) {
    try {
      c.estimator = gradient_estimator_from_string(*v);
    } catch (const Error& e) {
      r.error("estimator", e.what());
    }
  }
  if (auto v = r.boolean("shared_delta")) c.shared_delta = *v;
  return c;
}

BaselineConfig parse_baseline(const json& j, const std::string& path, Algorithm algorithm,
                              std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.reject_unknown({"eta0", "eta_max", "expand", "shrink", "forcing", "stp_schedule"});
  const bool polls = algorithm != Algorithm::kStp;
  BaselineConfig b;
  if (auto v = r.positive("eta0", true)) b.eta0 = *v;
  if (auto v = r.positive("eta_max", polls)) b.eta_max = *v;
  if (auto v = r.number("expand", false)) {
    if (*v > 1.0) {
      b.expand = *v;
    } else {
      r.error("expand", "must be > 1");
    }
  }
  if (auto v = r.number("shrink", false)) {
    if (*v > 0.0 && *v < 1.0) {
      b.shrink = *v;
    } else {
      r.error("shrink", "must lie in (0, 1)");
    }
  }
  if (auto v = r.number("forcing", false)) {
    if (*v >= 0.0) {
      b.forcing.coefficient = *v;
    } else {
      r.error("forcing", "must be >= 0");
    }
  }
  if (polls && b.eta0 > b.eta_max) r.error("eta0", "must not exceed eta_max");
  if (r.has("stp_schedule")) {
    Reader s(r.at("stp_schedule"), r.path("stp_schedule"), errors);
    s.reject_unknown({"kind", "period"});
    if (auto kind = s.string("kind", true)) {
      if (*kind == "halve_every") {
        b.stp_schedule.kind = StpSchedule::Kind::kHalveEvery;
        if (auto p = s.integer("period", false, 1)) b.stp_schedule.period = static_cast<int>(*p);
      } else if (*kind == "inv_sqrt") {
        b.stp_schedule.kind = StpSchedule::Kind::kInvSqrt;
      } else {
        s.error("kind", "must be 'halve_every' or 'inv_sqrt'");
      }
    }
  }
  return b;
}

json merged(json base, const json& patch) {
  base.merge_patch(patch);
  return base;
}

AlgorithmEntry parse_algorithm(const json& j, const std::string& path, const std::optional<std::string>& top_preset,
                               std::vector<std::string>& errors) {
  AlgorithmEntry entry;
  json obj = j;
  if (j.is_string()) obj = json{{"name", j}};
  Reader r(obj, path, errors);
  if (!r.ok()) return entry;
  r.reject_unknown({"name", "label", "preset", "schedule", "dfpi", "baseline", "max_iters"});

  const auto name = r.string("name", true);
  if (!name) return entry;
  try {
    entry.spec.algorithm = algorithm_from_string(*name);
  } catch (const Error& e) {
    r.error("name", e.what());
    return entry;
  }
  const Algorithm a = entry.spec.algorithm;
  entry.label = r.string("label", false).value_or(*name);
  if (entry.label.empty() || entry.label.find_first_of(",\n\r") != std::string::npos) {
    r.error("label", "must be non-empty and free of commas and line breaks");
  }
  if (auto it = r.integer("max_iters", false, 0)) entry.max_iters = static_cast<int>(*it);

  // Preset values first, explicit fields override them.
  json base = json::object();
  const auto preset_name = r.has("preset") ? r.string("preset", false) : top_preset;
  if (preset_name) {
    try {
      base = to_json(preset_algorithm(find_preset(*preset_name), a, entry.label).spec);
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) r.error("preset", p);
      return entry;
    }
  }

  auto block = [&](const char* key) -> std::optional<json> {
    json value = base.contains(key) ? base.at(key) : json();
    if (r.has(key)) value = value.is_null() ? r.at(key) : merged(value, r.at(key));
    if (value.is_null()) return std::nullopt;
    return value;
  };

  const bool two_step = a == Algorithm::kRs || a == Algorithm::kRspi;
  if (two_step) {
    if (auto s = block("schedule")) {
      entry.spec.schedule = parse_schedule(*s, r.path("schedule"), errors);
    } else {
      r.error("schedule", "missing required block for " + *name);
    }
    if (r.has("baseline")) r.error("baseline", "not used by " + *name);
  } else {
    if (auto b = block("baseline")) {
      entry.spec.baseline = parse_baseline(*b, r.path("baseline"), a, errors);
    } else {
      r.error("baseline", "missing required block for " + *name);
    }
    if (r.has("schedule")) r.error("schedule", "not used by " + *name);
  }
  if (a == Algorithm::kRspi) {
    entry.spec.dfpi = parse_dfpi(block("dfpi").value_or(json::object()), r.path("dfpi"), errors);
  } else if (r.has("dfpi")) {
    r.error("dfpi", "only used by rspi");
  }
  return entry;
}

ObjectiveConfig parse_objective(const json& j, const std::string& path, std::vector<std::string>& errors) {
  ObjectiveConfig o;
  Reader r(j, path, errors);
  if (!r.ok()) return o;
  r.reject_unknown({"name", "d", "saddle_indices", "saddle_coords", "matrix_seed", "eigenvalues", "rotate"});
  if (auto name = r.string("name", true)) {
    if (kObjectiveNames.count(*name)) {
      o.name = *name;
    } else {
      r.error("name", "unknown objective '" + *name + "' (expected quartic, rastrigin, leading-eig or quadratic-saddle)");
    }
  }
  if (r.has("eigenvalues")) {
    const json& ev = r.at("eigenvalues");
    if (!ev.is_array() || ev.empty()) {
      r.error("eigenvalues", "must be a non-empty array of numbers");
    } else {
      for (const auto& v : ev) {
        if (!v.is_number()) {
          r.error("eigenvalues", "must be a non-empty array of numbers");
          o.eigenvalues.clear();
          break;
        }
        o.eigenvalues.push_back(v.get<double>());
      }
    }
  }
  const bool d_required = o.name != "quadratic-saddle";
  if (auto d = r.integer("d", d_required, 1)) o.d = static_cast<int>(*d);
  if (o.name == "quadratic-saddle") {
    if (o.eigenvalues.empty()) {
      r.error("eigenvalues", "required for quadratic-saddle");
    } else {
      if (o.d == 0) o.d = static_cast<int>(o.eigenvalues.size());
      if (o.d != static_cast<int>(o.eigenvalues.size())) r.error("eigenvalues", "length must equal d");
      for (std::size_t i = 1; i < o.eigenvalues.size(); ++i) {
        if (o.eigenvalues[i] > o.eigenvalues[i - 1]) r.error("eigenvalues", "must be non-increasing");
      }
      if (!(o.eigenvalues.back() < 0.0)) r.error("eigenvalues", "last eigenvalue must be negative");
    }
  } else if (r.has("eigenvalues")) {
    r.error("eigenvalues", "only used by quadratic-saddle");
  }
  if (o.name == "leading-eig" && o.d == 1) r.error("d", "leading-eig needs d >= 2");
  if (r.has("matrix_seed")) {
    if (is_seed(r.at("matrix_seed"))) {
      o.matrix_seed = r.at("matrix_seed").get<std::uint64_t>();
    } else {
      r.error("matrix_seed", "must be a non-negative integer");
    }
  }
  if (auto v = r.boolean("rotate")) o.rotate = *v;
  if (auto k = r.integer("saddle_coords", false, 1)) {
    o.saddle_coords = static_cast<int>(*k);
    if (o.name == "rastrigin" && o.d > 0 && o.saddle_coords >= o.d) r.error("saddle_coords", "must be < d");
  }
  if (r.has("saddle_indices")) {
    const json& idx = r.at("saddle_indices");
    std::set<int> seen;
    if (!idx.is_array() || idx.empty()) {
      r.error("saddle_indices", "must be a non-empty array of indices");
    } else {
      for (const auto& v : idx) {
        if (!v.is_number_integer() || v.get<int>() < 0 || (o.d > 0 && v.get<int>() >= o.d) ||
            !seen.insert(v.get<int>()).second) {
          r.error("saddle_indices", "entries must be distinct integers in [0, d)");
          o.saddle_indices.clear();
          break;
        }
        o.saddle_indices.push_back(v.get<int>());
      }
      if (o.d > 0 && static_cast<int>(o.saddle_indices.size()) >= o.d) r.error("saddle_indices", "must have fewer than d entries");
    }
  }
  return o;
}

}  // namespace

json to_json(const ScheduleConfig& s) {
  return {{"sigma1", s.sigma1}, {"sigma2", s.sigma2}, {"rho", s.rho}, {"t_sigma1", s.t_sigma1}};
}

json to_json(const DfpiConfig& c) {
  json j = {{"eta", c.eta},
            {"t_dfpi", c.t_dfpi},
            {"estimator", to_string(c.estimator)},
            {"shared_delta", c.shared_delta}};
  if (c.c) j["c"] = *c.c;
  if (c.r) j["r"] = *c.r;
  return j;
}

json to_json(const BaselineConfig& b) {
  json sched = b.stp_schedule.kind == StpSchedule::Kind::kInvSqrt
                   ? json{{"kind", "inv_sqrt"}}
                   : json{{"kind", "halve_every"}, {"period", b.stp_schedule.period}};
  return {{"eta0", b.eta0},   {"eta_max", b.eta_max},           {"expand", b.expand},
          {"shrink", b.shrink}, {"forcing", b.forcing.coefficient}, {"stp_schedule", sched}};
}

json to_json(const AlgorithmSpec& spec) {
  json j = {{"name", to_string(spec.algorithm)}};
  if (spec.schedule) j["schedule"] = to_json(*spec.schedule);
  if (spec.dfpi) j["dfpi"] = to_json(*spec.dfpi);
  if (spec.baseline) j["baseline"] = to_json(*spec.baseline);
  return j;
}

json to_json(const ObjectiveConfig& o) {
  json j = {{"name", o.name}, {"d", o.d}, {"matrix_seed", o.matrix_seed}};
  if (o.name == "rastrigin") {
    if (o.saddle_indices.empty()) {
      j["saddle_coords"] = o.saddle_coords;
    } else {
      j["saddle_indices"] = o.saddle_indices;
    }
  }
  if (o.name == "quadratic-saddle") {
    j["eigenvalues"] = o.eigenvalues;
    j["rotate"] = o.rotate;
  }
  return j;
}

ExperimentConfig parse_config(const json& doc) {
  std::vector<std::string> errors;
  ExperimentConfig cfg;
  Reader r(doc, "", errors);
  if (!r.ok()) throw ConfigError(errors);
  r.reject_unknown({"objective", "preset", "algorithms", "seeds", "num_seeds", "max_iters", "record_grad_norm",
                    "record_time", "output", "summary_output", "time_summary_output", "time_bucket_ns",
                    "sweep_dims"});

  const auto top_preset = r.string("preset", false);
  const Preset* preset = nullptr;
  if (top_preset) {
    try {
      preset = &find_preset(*top_preset);
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) r.error("preset", p);
    }
  }

  json objective = preset ? to_json(preset->objective) : json();
  if (r.has("objective")) objective = objective.is_null() ? r.at("objective") : merged(objective, r.at("objective"));
  if (objective.is_null()) {
    r.error("objective", "missing required field");
  } else {
    cfg.objective = parse_objective(objective, "objective", errors);
  }

  if (r.has("algorithms")) {
    const json& algs = r.at("algorithms");
    if (!algs.is_array() || algs.empty()) {
      r.error("algorithms", "must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < algs.size(); ++i) {
        const std::string path = "algorithms[" + std::to_string(i) + "]";
        if (algs[i].is_string() && !preset) {
          errors.push_back(path + ": a bare algorithm name needs a top-level preset");
          continue;
        }
        cfg.algorithms.push_back(parse_algorithm(algs[i], path, top_preset, errors));
      }
    }
  } else if (preset) {
    for (const auto& e : preset->algorithms) cfg.algorithms.push_back(e);
  } else {
    r.error("algorithms", "missing required field");
  }
  std::set<std::string> labels;
  for (const auto& a : cfg.algorithms) {
    if (!a.label.empty() && !labels.insert(a.label).second) {
      errors.push_back("algorithms: duplicate label '" + a.label + "' (set distinct \"label\" fields)");
    }
  }

  if (r.has("seeds") && r.has("num_seeds")) r.error("seeds", "give either seeds or num_seeds, not both");
  if (r.has("seeds")) {
    const json& seeds = r.at("seeds");
    std::set<std::uint64_t> seen;
    if (!seeds.is_array() || seeds.empty()) {
      r.error("seeds", "must be a non-empty array of non-negative integers");
    } else {
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!is_seed(seeds[i])) {
          errors.push_back("seeds[" + std::to_string(i) + "]: must be a non-negative integer");
          continue;
        }
        const auto s = seeds[i].get<std::uint64_t>();
        if (!seen.insert(s).second) errors.push_back("seeds[" + std::to_string(i) + "]: duplicate seed " + std::to_string(s));
        cfg.seeds.push_back(s);
      }
    }
  } else if (auto n = r.integer("num_seeds", false, 1)) {
    for (std::int64_t s = 1; s <= *n; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  } else if (!r.has("num_seeds")) {
    r.error("seeds", "missing required field (or give num_seeds)");
  }

  if (auto m = r.integer("max_iters", true, 0)) cfg.max_iters = static_cast<int>(*m);
  if (auto v = r.boolean("record_grad_norm")) cfg.record_grad_norm = *v;
  if (auto v = r.boolean("record_time")) cfg.record_time = *v;
  if (auto v = r.string("output", false)) cfg.output_path = *v;
  if (auto v = r.string("summary_output", false)) cfg.summary_path = *v;
  if (auto v = r.string("time_summary_output", false)) cfg.time_summary_path = *v;
  if (auto v = r.integer("time_bucket_ns", false, 1)) cfg.time_bucket_ns = *v;
  if (!cfg.time_summary_path.empty() && cfg.time_bucket_ns == 0) {
    r.error("time_bucket_ns", "required with time_summary_output");
  }
  if (r.has("sweep_dims")) {
    const json& dims = r.at("sweep_dims");
    if (!dims.is_array() || dims.empty()) {
      r.error("sweep_dims", "must be a non-empty array of positive integers");
    } else {
      for (const auto& v : dims) {
        if (!v.is_number_integer() || v.get<int>() < 1) {
          r.error("sweep_dims", "must be a non-empty array of positive integers");
          break;
        }
        cfg.sweep_dims.push_back(v.get<int>());
      }
    }
  }

  if (!errors.empty()) throw ConfigError(errors);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open file"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return parse_config(doc);
}

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  if (!kObjectiveNames.count(cfg.objective.name)) errors.push_back("objective.name: unknown objective '" + cfg.objective.name + "'");
  if (cfg.objective.d < 1) errors.push_back("objective.d: must be >= 1");
  if (cfg.algorithms.empty()) errors.push_back("algorithms: must be non-empty");
  if (cfg.seeds.empty()) errors.push_back("seeds: must be non-empty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    errors.push_back("seeds: must be distinct");
  }
  if (cfg.max_iters < 0) errors.push_back("max_iters: must be >= 0");
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    const auto& a = cfg.algorithms[i];
    const std::string path = "algorithms[" + std::to_string(i) + "]";
    try {
      switch (a.spec.algorithm) {
        case Algorithm::kRs:
        case Algorithm::kRspi:
          if (!a.spec.schedule) throw InvalidArgument("missing schedule");
          a.spec.schedule->validate();
          if (a.spec.algorithm == Algorithm::kRspi) {
            if (!a.spec.dfpi) throw InvalidArgument("missing dfpi");
            a.spec.dfpi->validate();
          }
          break;
        default:
          if (!a.spec.baseline) throw InvalidArgument("missing baseline");
          a.spec.baseline->validate(a.spec.algorithm);
      }
    } catch (const Error& e) {
      errors.push_back(path + ": " + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
}

std::string config_hash(const ObjectiveConfig& objective, const AlgorithmEntry& entry) {
  json j = {{"objective", to_json(objective)}, {"algorithm", to_json(entry.spec)}, {"label", entry.label}};
  if (entry.max_iters) j["max_iters"] = *entry.max_iters;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace curvesearch
