#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "curvesearch/analysis.hpp"
#include "curvesearch/config.hpp"
#include "curvesearch/errors.hpp"
#include "curvesearch/experiment.hpp"
#include "curvesearch/presets.hpp"

namespace py = pybind11;
namespace cs = curvesearch;
using nlohmann::json;

namespace {

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw cs::ConfigError({std::string("config: ") + e.what()});
  }
}

py::dict trace_to_dict(const cs::RunTrace& t) {
  std::vector<std::int64_t> iters, evals, elapsed;
  std::vector<double> f;
  std::vector<std::optional<double>> grad;
  for (const auto& r : t.rows) {
    iters.push_back(r.iter);
    evals.push_back(r.evals);
    elapsed.push_back(r.elapsed_ns);
    f.push_back(r.f);
    grad.push_back(r.grad_norm);
  }
  py::dict d;
  d["algorithm"] = t.meta.algorithm;
  d["objective"] = t.meta.objective;
  d["d"] = t.meta.d;
  d["seed"] = t.meta.seed;
  d["config_hash"] = t.meta.config_hash;
  d["f_star"] = t.meta.f_star;
  d["iter"] = iters;
  d["evals"] = evals;
  d["elapsed_ns"] = elapsed;
  d["f"] = f;
  d["grad_norm"] = grad;
  d["final_x"] = t.final_x;
  d["diagnostics"] = t.diagnostics;
  return d;
}

py::list report_rows(const cs::BoundReport& rep) {
  py::list out;
  for (const auto& row : rep.rows) {
    py::dict d;
    for (std::size_t i = 0; i < rep.param_names.size() && i < row.params.size(); ++i) {
      d[py::str(rep.param_names[i])] = row.params[i];
    }
    d["lower"] = row.lower;
    d["estimate"] = row.estimate;
    d["ci"] = row.ci_halfwidth;
    d["upper"] = row.upper;
    d["pass"] = row.pass;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "curvesearch native core";

  auto base = py::register_exception<cs::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<cs::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<cs::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<cs::UnsupportedOracle>(m, "UnsupportedOracle", base.ptr());
  py::register_exception<cs::NumericalError>(m, "NumericalError", base.ptr());

  m.def(
      "run_experiment",
      [](const std::string& config_json, int threads) {
        const auto cfg = cs::parse_config(parse_text(config_json));
        std::vector<cs::RunTrace> traces;
        {
          py::gil_scoped_release release;
          cs::ExperimentOptions o;
          o.threads = cs::resolve_threads(threads);
          traces = cs::run_experiment(cfg, o);
        }
        py::list out;
        for (const auto& t : traces) out.append(trace_to_dict(t));
        return out;
      },
      py::arg("config_json"), py::arg("threads") = 1);

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : cs::presets()) names.push_back(p.name);
    return names;
  });

  m.def("escape_probability_grid",
        [](const std::vector<int>& dims, const std::vector<double>& lambda_ds, const std::vector<double>& sigma2s,
           std::int64_t trials, std::uint64_t seed, int threads) {
          cs::BoundReport rep;
          {
            py::gil_scoped_release release;
            rep = cs::escape_probability_grid(dims, lambda_ds, sigma2s, trials, cs::Rng(seed), threads);
          }
          return report_rows(rep);
        },
        py::arg("dims"), py::arg("lambda_ds"), py::arg("sigma2s"), py::arg("trials"), py::arg("seed") = 0,
        py::arg("threads") = 1);

  m.def("sphere_cap_bounds_check",
        [](int d, const std::vector<double>& varsigmas, std::int64_t trials, std::uint64_t seed) {
          cs::Rng rng(seed);
          return report_rows(cs::sphere_cap_bounds_check(d, varsigmas, trials, rng));
        },
        py::arg("d"), py::arg("varsigmas"), py::arg("trials"), py::arg("seed") = 0);

  m.def("integral_bounds_check",
        [](const std::vector<double>& alphas, const std::vector<double>& varsigmas) {
          return report_rows(cs::integral_bounds_check(alphas, varsigmas));
        },
        py::arg("alphas"), py::arg("varsigmas"));

  m.def("cap_lower_bound", &cs::cap_lower_bound, py::arg("d"), py::arg("varsigma"));
  m.def("cap_upper_bound", &cs::cap_upper_bound, py::arg("d"), py::arg("varsigma"));
  m.def("escape_lower_bound", &cs::escape_lower_bound, py::arg("gamma"), py::arg("l1"), py::arg("d"));

  m.def(
      "dfpi_alignment",
      [](int d, double lambda_d, const std::string& estimator, double eta, int t_dfpi, std::uint64_t seed,
         double sigma2, bool shared_delta) {
        cs::DfpiConfig cfg;
        cfg.estimator = cs::gradient_estimator_from_string(estimator);
        cfg.eta = eta;
        cfg.t_dfpi = t_dfpi;
        cfg.shared_delta = shared_delta;
        cs::Rng rng(seed);
        std::vector<double> align, fv;
        for (const auto& p : cs::dfpi_alignment_trace(cs::worst_case_saddle(d, lambda_d), cfg, rng, sigma2)) {
          align.push_back(p.alignment);
          fv.push_back(p.f_value);
        }
        return py::make_tuple(align, fv);
      },
      py::arg("d"), py::arg("lambda_d"), py::arg("estimator") = "fd", py::arg("eta") = 0.4,
      py::arg("t_dfpi") = 100, py::arg("seed") = 1, py::arg("sigma2") = 1.0, py::arg("shared_delta") = false);
}
