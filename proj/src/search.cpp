#include "curvesearch/search.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "curvesearch/errors.hpp"

namespace curvesearch {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Appends trace rows; evals are counted from construction.
class Recorder {
 public:
  Recorder(const char* algorithm, const Objective& f, const RunOptions& opts)
      : f_(f), opts_(opts), start_count_(f.eval_count()), start_(std::chrono::steady_clock::now()) {
    trace_.meta.algorithm = algorithm;
    trace_.meta.objective = f.name();
    trace_.meta.d = f.param_d();
    trace_.meta.seed = opts.seed;
    trace_.meta.f_star = f.f_star();
  }

  void record(std::int64_t iter, double fx, const Vector& x) {
    TraceRow row;
    row.iter = iter;
    row.evals = f_.eval_count() - start_count_;
    if (opts_.record_time) {
      row.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::steady_clock::now() - start_)
                           .count();
    }
    row.f = fx;
    if (opts_.record_grad_norm && f_.has_gradient()) row.grad_norm = f_.gradient(x).norm();
    trace_.rows.push_back(row);
  }

  RunTrace finish(Vector x) {
    trace_.final_x = std::move(x);
    return std::move(trace_);
  }

  RunTrace& trace() { return trace_; }

 private:
  const Objective& f_;
  const RunOptions& opts_;
  std::int64_t start_count_;
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
};

void check_start(const Objective& f, const Vector& x0) {
  if (x0.size() != f.dim()) {
    throw InvalidArgument("start point has dimension " + std::to_string(x0.size()) + ", objective '" +
                          f.name() + "' expects " + std::to_string(f.dim()));
  }
  require_finite(x0, "start point");
}

// x <- argmin{f(x), f(x + step s), f(x - step s)}. Ties keep x, then prefer +s.
bool three_point_step(Objective& f, Vector& x, double& fx, const Vector& s, double step) {
  Vector plus = x + step * s;
  Vector minus = x - step * s;
  const double f_plus = f.eval(plus);
  const double f_minus = f.eval(minus);
  if (f_plus < fx && f_plus <= f_minus) {
    x = std::move(plus);
    fx = f_plus;
    return true;
  }
  if (f_minus < fx) {
    x = std::move(minus);
    fx = f_minus;
    return true;
  }
  return false;
}

RunTrace two_step_impl(const char* name, Objective& f, const Vector& x0, const ScheduleConfig& sched,
                       const DfpiConfig* dfpi, Rng& rng, const RunOptions& opts) {
  sched.validate();
  if (dfpi) dfpi->validate();
  check_start(f, x0);
  Recorder rec(name, f, opts);
  Vector x = x0;
  double fx = f.eval(x);
  rec.record(0, fx, x);

  const int d = f.dim();
  double sigma1 = sched.sigma1;
  for (int k = 0; k < sched.max_iters; ++k) {
    const Vector s1 = sample_unit_sphere(rng, d);
    three_point_step(f, x, fx, s1, sigma1);

    // Curvature direction is computed at the point the curvature step perturbs.
    const Vector s2 = dfpi ? dfpi_direction(f, x, *dfpi, rng).direction : sample_unit_sphere(rng, d);
    three_point_step(f, x, fx, s2, sched.sigma2);

    if ((k + 1) % sched.t_sigma1 == 0) sigma1 *= sched.rho;
    rec.record(k + 1, fx, x);
  }
  return rec.finish(std::move(x));
}

// BDS/AHDS step size update.
double update_step(const BaselineConfig& cfg, double eta, bool success) {
  return success ? std::min(cfg.expand * eta, cfg.eta_max) : cfg.shrink * eta;
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kRs: return "rs";
    case Algorithm::kRspi: return "rspi";
    case Algorithm::kStp: return "stp";
    case Algorithm::kBds: return "bds";
    case Algorithm::kAhds: return "ahds";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "rs") return Algorithm::kRs;
  if (s == "rspi") return Algorithm::kRspi;
  if (s == "stp") return Algorithm::kStp;
  if (s == "bds") return Algorithm::kBds;
  if (s == "ahds") return Algorithm::kAhds;
  throw InvalidArgument("unknown algorithm '" + s + "' (expected rs, rspi, stp, bds or ahds)");
}

void ScheduleConfig::validate() const {
  if (!positive_finite(sigma1)) throw InvalidArgument("schedule: sigma1 must be positive");
  if (!positive_finite(sigma2)) throw InvalidArgument("schedule: sigma2 must be positive");
  if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("schedule: rho must lie in (0, 1]");
  if (t_sigma1 < 1) throw InvalidArgument("schedule: t_sigma1 must be >= 1");
  if (max_iters < 0) throw InvalidArgument("schedule: max_iters must be >= 0");
}

double StpSchedule::next(double eta0, double eta_k, int k) const {
  if (kind == Kind::kInvSqrt) return eta0 / std::sqrt(static_cast<double>(k) + 2.0);
  return (k + 1) % period == 0 ? 0.5 * eta_k : eta_k;
}

void BaselineConfig::validate(Algorithm for_algorithm) const {
  if (!positive_finite(eta0)) throw InvalidArgument("baseline: eta0 must be positive");
  if (max_iters < 0) throw InvalidArgument("baseline: max_iters must be >= 0");
  if (!(forcing.coefficient >= 0.0) || !std::isfinite(forcing.coefficient)) {
    throw InvalidArgument("baseline: forcing coefficient must be >= 0");
  }
  if (for_algorithm == Algorithm::kStp) {
    if (stp_schedule.kind == StpSchedule::Kind::kHalveEvery && stp_schedule.period < 1) {
      throw InvalidArgument("baseline: stp schedule period must be >= 1");
    }
    return;
  }
  if (!positive_finite(eta_max) || eta0 > eta_max) throw InvalidArgument("baseline: need 0 < eta0 <= eta_max");
  if (!(expand > 1.0) || !std::isfinite(expand)) throw InvalidArgument("baseline: expand must be > 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("baseline: shrink must lie in (0, 1)");
}

RunTrace two_step_rs(Objective& f, const Vector& x0, const ScheduleConfig& sched, Rng& rng,
                     const RunOptions& opts) {
  return two_step_impl("rs", f, x0, sched, nullptr, rng, opts);
}

RunTrace rspi(Objective& f, const Vector& x0, const ScheduleConfig& sched, const DfpiConfig& dfpi,
              Rng& rng, const RunOptions& opts) {
  return two_step_impl("rspi", f, x0, sched, &dfpi, rng, opts);
}

RunTrace stp(Objective& f, const Vector& x0, const BaselineConfig& cfg, Rng& rng, const RunOptions& opts) {
  cfg.validate(Algorithm::kStp);
  check_start(f, x0);
  Recorder rec("stp", f, opts);
  Vector x = x0;
  double fx = f.eval(x);
  rec.record(0, fx, x);
  double eta = cfg.eta0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const Vector s = sample_unit_sphere(rng, f.dim());
    three_point_step(f, x, fx, s, eta);
    eta = cfg.stp_schedule.next(cfg.eta0, eta, k);
    rec.record(k + 1, fx, x);
  }
  return rec.finish(std::move(x));
}

RunTrace bds(Objective& f, const Vector& x0, const BaselineConfig& cfg, const RunOptions& opts) {
  cfg.validate(Algorithm::kBds);
  check_start(f, x0);
  Recorder rec("bds", f, opts);
  Vector x = x0;
  double fx = f.eval(x);
  rec.record(0, fx, x);
  const int d = f.dim();
  double eta = cfg.eta0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const double threshold = fx - cfg.forcing(eta);
    bool success = false;
    // Poll e_1, -e_1, e_2, -e_2, ... and stop at the first sufficient decrease.
    for (int i = 0; i < d && !success; ++i) {
      const double xi = x[i];
      for (double sign : {1.0, -1.0}) {
        x[i] = xi + sign * eta;
        const double fy = f.eval(x);
        if (fy < threshold) {
          fx = fy;
          success = true;
          break;
        }
      }
      if (!success) x[i] = xi;
    }
    eta = update_step(cfg, eta, success);
    rec.record(k + 1, fx, x);
  }
  return rec.finish(std::move(x));
}

Matrix ahds_hessian_from_values(double f_x, const Vector& plus, const Vector& minus, const Matrix& pairs,
                                double eta) {
  const auto d = plus.size();
  const double inv = 1.0 / (eta * eta);
  Matrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    h(i, i) = (plus[i] - 2.0 * f_x + minus[i]) * inv;
    for (Eigen::Index j = i + 1; j < d; ++j) {
      h(i, j) = (pairs(i, j) - plus[i] - plus[j] + f_x) * inv;
      h(j, i) = h(i, j);
    }
  }
  return h;
}

Matrix ahds_hessian(Objective& f, const Vector& x, double eta) {
  const int d = f.dim();
  const double fx = f.eval(x);
  Vector plus(d), minus(d);
  Matrix pairs = Matrix::Zero(d, d);
  Vector y = x;
  for (int i = 0; i < d; ++i) {
    y[i] = x[i] + eta;
    plus[i] = f.eval(y);
    y[i] = x[i] - eta;
    minus[i] = f.eval(y);
    y[i] = x[i];
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      y[i] = x[i] + eta;
      y[j] = x[j] + eta;
      pairs(i, j) = f.eval(y);
      y[i] = x[i];
      y[j] = x[j];
    }
  }
  return ahds_hessian_from_values(fx, plus, minus, pairs, eta);
}

std::int64_t ahds_full_iteration_evals(int d) {
  const std::int64_t dd = d;
  return 2 * dd + dd * (dd - 1) / 2 + 2;
}

RunTrace ahds(Objective& f, const Vector& x0, const BaselineConfig& cfg, const RunOptions& opts) {
  cfg.validate(Algorithm::kAhds);
  check_start(f, x0);
  Recorder rec("ahds", f, opts);
  auto& failures = rec.trace().diagnostics["ahds.eigensolver_failures"];
  auto& reached_step7 = rec.trace().diagnostics["ahds.hessian_steps"];
  Vector x = x0;
  double fx = f.eval(x);
  rec.record(0, fx, x);
  const int d = f.dim();
  double eta = cfg.eta0;
  Vector plus(d), minus(d);
  Matrix pairs(d, d);

  for (int k = 0; k < cfg.max_iters; ++k) {
    const double threshold = fx - cfg.forcing(eta);
    bool success = false;

    // Poll D = {+-e_i}. Since D is symmetric, polling -D again is redundant.
    for (int i = 0; i < d && !success; ++i) {
      const double xi = x[i];
      x[i] = xi + eta;
      plus[i] = f.eval(x);
      if (plus[i] < threshold) {
        fx = plus[i];
        success = true;
        break;
      }
      x[i] = xi - eta;
      minus[i] = f.eval(x);
      if (minus[i] < threshold) {
        fx = minus[i];
        success = true;
        break;
      }
      x[i] = xi;
    }

    // Pairwise sums u_i + u_j of the basis u_i = e_i.
    for (int i = 0; i < d && !success; ++i) {
      const double xi = x[i];
      x[i] = xi + eta;
      for (int j = i + 1; j < d; ++j) {
        const double xj = x[j];
        x[j] = xj + eta;
        pairs(i, j) = f.eval(x);
        if (pairs(i, j) < threshold) {
          fx = pairs(i, j);
          success = true;
          break;
        }
        x[j] = xj;
      }
      if (!success) x[i] = xi;
    }

    // Minimum eigenvector of the finite-difference Hessian built from cached values.
    if (!success) {
      ++reached_step7;
      const Matrix h = ahds_hessian_from_values(fx, plus, minus, pairs, eta);
      if (opts.ahds_hessian_observer) opts.ahds_hessian_observer(h);
      try {
        const EigPair eig = min_eigpair_symmetric(h, 1e-10);
        for (double sign : {1.0, -1.0}) {
          Vector y = x + (sign * eta) * eig.vector;
          const double fy = f.eval(y);
          if (fy < threshold) {
            x = std::move(y);
            fx = fy;
            success = true;
            break;
          }
        }
      } catch (const Error&) {
        ++failures;
      }
    }

    eta = update_step(cfg, eta, success);
    rec.record(k + 1, fx, x);
  }
  return rec.finish(std::move(x));
}

RunTrace run(const AlgorithmSpec& spec, Objective& f, const Vector& x0, Rng& rng, const RunOptions& opts) {
  auto missing = [&](const char* block) {
    return ConfigError({std::string(to_string(spec.algorithm)) + ": missing '" + block + "' configuration"});
  };
  switch (spec.algorithm) {
    case Algorithm::kRs:
      if (!spec.schedule) throw missing("schedule");
      return two_step_rs(f, x0, *spec.schedule, rng, opts);
    case Algorithm::kRspi:
      if (!spec.schedule) throw missing("schedule");
      if (!spec.dfpi) throw missing("dfpi");
      return rspi(f, x0, *spec.schedule, *spec.dfpi, rng, opts);
    case Algorithm::kStp:
      if (!spec.baseline) throw missing("baseline");
      return stp(f, x0, *spec.baseline, rng, opts);
    case Algorithm::kBds:
      if (!spec.baseline) throw missing("baseline");
      return bds(f, x0, *spec.baseline, opts);
    case Algorithm::kAhds:
      if (!spec.baseline) throw missing("baseline");
      return ahds(f, x0, *spec.baseline, opts);
  }
  throw InvalidArgument("run: unknown algorithm");
}

}  // namespace curvesearch
