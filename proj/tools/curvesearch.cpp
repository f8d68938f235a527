// curvesearch command-line front end.
//
// Exit status: 0 on success, 1 on invalid configuration or arguments,
// 2 when a run fails. Progress goes to stderr; data goes to --out or stdout.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvesearch/analysis.hpp"
#include "curvesearch/config.hpp"
#include "curvesearch/csv.hpp"
#include "curvesearch/errors.hpp"
#include "curvesearch/experiment.hpp"
#include "curvesearch/presets.hpp"

namespace cs = curvesearch;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  int seeds = 0;
  std::vector<std::uint64_t> seed_list;
  int threads = 1;
  int max_iters = -1;
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  if (with_config) {
    cmd->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", c.preset, "preset name, e.g. paper/rastrigin-d200");
    cmd->add_option("--max-iters", c.max_iters, "iterations per run (overrides the config)")
        ->check(CLI::NonNegativeNumber);
  }
  auto* n = cmd->add_option("--seeds", c.seeds, "use seeds 1..N")->check(CLI::PositiveNumber);
  cmd->add_option("--seed-list", c.seed_list, "explicit seeds")->delimiter(',')->excludes(n);
  cmd->add_option("--threads", c.threads, "worker threads (CURVESEARCH_THREADS overrides)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output CSV path (stdout when omitted)");
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cs::ConfigError({path + ": cannot open file"});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw cs::ConfigError({path + ": " + e.what()});
  }
}

// Config document with command-line overrides applied.
json experiment_document(const Common& c) {
  json doc = c.config.empty() ? json::object() : read_json(c.config);
  if (!c.preset.empty()) doc["preset"] = c.preset;
  if (c.seeds > 0) {
    doc.erase("seeds");
    doc["num_seeds"] = c.seeds;
  } else if (!c.seed_list.empty()) {
    doc.erase("num_seeds");
    doc["seeds"] = c.seed_list;
  }
  if (c.max_iters >= 0) doc["max_iters"] = c.max_iters;
  if (!c.out.empty()) doc["output"] = c.out;
  return doc;
}

std::vector<std::uint64_t> seed_values(const Common& c, std::uint64_t fallback) {
  if (!c.seed_list.empty()) return c.seed_list;
  std::vector<std::uint64_t> s;
  if (c.seeds > 0) {
    for (int i = 1; i <= c.seeds; ++i) s.push_back(static_cast<std::uint64_t>(i));
  } else {
    s.push_back(fallback);
  }
  return s;
}

cs::ExperimentOptions options(const Common& c) {
  cs::ExperimentOptions o;
  o.threads = cs::resolve_threads(c.threads);
  o.progress = [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r[%zu/%zu] runs finished", done, total);
    if (done == total) std::fputc('\n', stderr);
  };
  return o;
}

void make_parent_dir(const std::string& path) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
}

void emit(const std::string& path, const std::string& content) {
  make_parent_dir(path);
  if (path.empty()) {
    std::cout << content;
  } else {
    cs::write_text_file(path, content);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
}

void finish_experiment(const cs::ExperimentConfig& cfg, const std::vector<cs::RunTrace>& traces) {
  for (const auto* p : {&cfg.output_path, &cfg.summary_path, &cfg.time_summary_path}) make_parent_dir(*p);
  if (cfg.output_path.empty()) {
    cs::write_traces_csv(std::cout, traces);
    auto rest = cfg;
    rest.output_path.clear();
    cs::write_outputs(rest, traces);
  } else {
    cs::write_outputs(cfg, traces);
  }
}

int cmd_run(const Common& c) {
  if (c.config.empty() && c.preset.empty()) throw cs::ConfigError({"run: give --config or --preset"});
  const auto cfg = cs::parse_config(experiment_document(c));
  finish_experiment(cfg, cs::run_experiment(cfg, options(c)));
  return 0;
}

int cmd_sweep(const Common& c) {
  if (c.config.empty()) throw cs::ConfigError({"sweep: --config is required"});
  const json doc = experiment_document(c);
  const auto traces = cs::run_sweep(doc, options(c));
  std::ostringstream os;
  cs::write_traces_csv(os, traces);
  emit(c.out.empty() ? doc.value("output", std::string()) : c.out, os.str());
  return 0;
}

struct EscapeArgs {
  std::vector<int> dims = {4, 6, 8, 10, 12};
  std::vector<double> lambdas = {-0.5, -1.0};
  std::vector<double> sigma2s = {1.0};
  std::int64_t trials = 1000000;
};

int cmd_escape(const Common& c, const EscapeArgs& a) {
  const cs::Rng rng(seed_values(c, 0).front());
  const auto rep = cs::escape_probability_grid(a.dims, a.lambdas, a.sigma2s, a.trials, rng,
                                               cs::resolve_threads(c.threads));
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::ostringstream os;
  cs::write_escape_csv(os, rep);
  emit(c.out, os.str());
  return 0;
}

struct BoundsArgs {
  std::string kind = "cap";
  std::vector<int> dims = {4, 8, 16, 32};
  std::vector<double> varsigmas = {0.1, 0.3, 0.5, 0.7};
  std::vector<double> alphas = {1.5, 2, 5, 10, 25};
  std::int64_t trials = 1000000;
};

int cmd_bounds(const Common& c, const BoundsArgs& a) {
  std::ostringstream os;
  bool pass = true;
  if (a.kind == "integral") {
    const auto rep = cs::integral_bounds_check(a.alphas, a.varsigmas);
    cs::write_bound_report_csv(os, rep);
    pass = rep.all_pass();
  } else {
    cs::Rng rng(seed_values(c, 0).front());
    cs::BoundReport all;
    for (int d : a.dims) {
      cs::Rng cell = rng.split(static_cast<std::uint64_t>(d));
      auto rep = cs::sphere_cap_bounds_check(d, a.varsigmas, a.trials, cell);
      all.name = rep.name;
      all.param_names = rep.param_names;
      all.rows.insert(all.rows.end(), rep.rows.begin(), rep.rows.end());
      all.warnings.insert(all.warnings.end(), rep.warnings.begin(), rep.warnings.end());
    }
    for (const auto& w : all.warnings) std::fprintf(stderr, "note: %s\n", w.c_str());
    cs::write_bound_report_csv(os, all);
    pass = all.all_pass();
  }
  emit(c.out, os.str());
  std::fprintf(stderr, "%s\n", pass ? "all bounds hold" : "some bounds violated");
  return 0;
}

struct ProbeArgs {
  int d = 50;
  double lambda_d = -0.1;
  std::string estimator = "fd";
  double eta = 0.4;
  int t_dfpi = 100;
  double sigma2 = 1.0;
  bool rotate = false;
  bool shared_delta = false;
};

int cmd_probe(const Common& c, const ProbeArgs& a) {
  cs::QuadraticSaddleSpec spec = cs::worst_case_saddle(a.d, a.lambda_d);
  if (a.rotate) {
    cs::Rng rot(0, 3);
    spec.rotation = cs::random_orthogonal(rot, a.d);
  }
  cs::DfpiConfig cfg;
  cfg.estimator = cs::gradient_estimator_from_string(a.estimator);
  cfg.eta = a.eta;
  cfg.t_dfpi = a.t_dfpi;
  cfg.shared_delta = a.shared_delta;
  std::vector<cs::AlignmentSeries> series;
  for (std::uint64_t seed : seed_values(c, 1)) {
    cs::Rng rng(seed);
    series.push_back({a.estimator, seed, cs::dfpi_alignment_trace(spec, cfg, rng, a.sigma2)});
  }
  std::ostringstream os;
  cs::write_alignment_csv(os, series);
  emit(c.out, os.str());
  return 0;
}

int cmd_presets(const std::string& show) {
  if (show.empty()) {
    for (const auto& p : cs::presets()) {
      std::cout << p.name << "  (" << p.objective.name << ", d=" << p.objective.d << ", " << p.algorithms.size()
                << " algorithms)\n";
    }
    return 0;
  }
  const auto& p = cs::find_preset(show);
  json algs = json::array();
  for (const auto& e : p.algorithms) {
    json j = cs::to_json(e.spec);
    j["label"] = e.label;
    algs.push_back(j);
  }
  std::cout << json{{"name", p.name}, {"objective", cs::to_json(p.objective)}, {"algorithms", algs}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free saddle-escape search: experiments and bound checks"};
  app.require_subcommand(1);

  Common run_c, sweep_c, esc_c, bnd_c, probe_c;
  auto* run = app.add_subcommand("run", "run one experiment config");
  add_common(run, run_c, true);

  auto* sweep = app.add_subcommand("sweep", "run a config once per entry of sweep_dims");
  add_common(sweep, sweep_c, true);

  EscapeArgs esc_a;
  auto* esc = app.add_subcommand("escape-prob", "curvature-step decrease probability on worst-case saddles");
  add_common(esc, esc_c, false);
  esc->add_option("--dims", esc_a.dims)->delimiter(',')->check(CLI::PositiveNumber);
  esc->add_option("--lambda-d", esc_a.lambdas)->delimiter(',');
  esc->add_option("--sigma2", esc_a.sigma2s)->delimiter(',');
  esc->add_option("--trials", esc_a.trials)->check(CLI::PositiveNumber);

  BoundsArgs bnd_a;
  auto* bnd = app.add_subcommand("verify-bounds", "sphere-cap and integral bound checks");
  add_common(bnd, bnd_c, false);
  bnd->add_option("--kind", bnd_a.kind)->check(CLI::IsMember({"cap", "integral"}));
  bnd->add_option("--dims", bnd_a.dims)->delimiter(',');
  bnd->add_option("--varsigma", bnd_a.varsigmas)->delimiter(',');
  bnd->add_option("--alpha", bnd_a.alphas)->delimiter(',');
  bnd->add_option("--trials", bnd_a.trials)->check(CLI::PositiveNumber);

  ProbeArgs probe_a;
  auto* probe = app.add_subcommand("dfpi-probe", "DFPI alignment traces on a quadratic saddle");
  add_common(probe, probe_c, false);
  probe->add_option("--d", probe_a.d)->check(CLI::PositiveNumber);
  probe->add_option("--lambda-d", probe_a.lambda_d);
  probe->add_option("--estimator", probe_a.estimator)->check(CLI::IsMember({"fd", "spsa"}));
  probe->add_option("--eta", probe_a.eta);
  probe->add_option("--t-dfpi", probe_a.t_dfpi)->check(CLI::NonNegativeNumber);
  probe->add_option("--sigma2", probe_a.sigma2);
  probe->add_flag("--rotate", probe_a.rotate, "apply a random rotation to the spectrum");
  probe->add_flag("--shared-delta", probe_a.shared_delta, "SPSA: one sign vector per iteration");

  std::string show;
  auto* pre = app.add_subcommand("presets", "list presets or print one as JSON");
  pre->add_option("--show", show, "preset name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (run->parsed()) return cmd_run(run_c);
    if (sweep->parsed()) return cmd_sweep(sweep_c);
    if (esc->parsed()) return cmd_escape(esc_c, esc_a);
    if (bnd->parsed()) return cmd_bounds(bnd_c, bnd_a);
    if (probe->parsed()) return cmd_probe(probe_c, probe_a);
    if (pre->parsed()) return cmd_presets(show);
  } catch (const cs::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInvalid;
  } catch (const cs::InvalidArgument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitInvalid;
}
