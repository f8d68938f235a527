#include "curvesearch/dfpi.hpp"

#include <cmath>

#include "curvesearch/errors.hpp"

namespace curvesearch {

namespace {

// Below this norm the unnormalized power update is treated as zero.
constexpr double kDegenerateNorm = 1e-14;

}  // namespace

const char* to_string(GradientEstimator e) {
  return e == GradientEstimator::kSpsa ? "spsa" : "fd";
}

GradientEstimator gradient_estimator_from_string(const std::string& s) {
  if (s == "fd" || s == "FD") return GradientEstimator::kFiniteDifference;
  if (s == "spsa" || s == "SPSA") return GradientEstimator::kSpsa;
  throw InvalidArgument("unknown gradient estimator '" + s + "' (expected fd or spsa)");
}

void DfpiConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (c && !positive(*c)) throw InvalidArgument("dfpi: c must be finite and positive");
  if (r && !positive(*r)) throw InvalidArgument("dfpi: r must be finite and positive");
  if (!positive(eta)) throw InvalidArgument("dfpi: eta must be finite and positive");
  if (t_dfpi < 0) throw InvalidArgument("dfpi: t_dfpi must be >= 0");
}

double DfpiConfig::c_at(const Vector& x) const { return c.value_or(1e-5 * (1.0 + x.norm())); }
double DfpiConfig::r_at(const Vector& x) const { return r.value_or(1e-3 * (1.0 + x.norm())); }

std::int64_t DfpiConfig::eval_budget(int d) const {
  const std::int64_t per_iter = estimator == GradientEstimator::kSpsa ? 4 : 4 * static_cast<std::int64_t>(d);
  return per_iter * t_dfpi;
}

Vector fd_gradient(Objective& f, const Vector& x, double c) {
  if (!(c > 0.0)) throw InvalidArgument("fd_gradient: c must be positive");
  const auto d = x.size();
  Vector g(d);
  Vector probe = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    probe[i] = x[i] + c;
    const double up = f.eval(probe);
    probe[i] = x[i] - c;
    const double down = f.eval(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * c);
  }
  return g;
}

Vector spsa_gradient(Objective& f, const Vector& x, double c, const Vector& delta) {
  if (!(c > 0.0)) throw InvalidArgument("spsa_gradient: c must be positive");
  require_same_dim(x, delta, "spsa_gradient");
  const double diff = f.eval(x + c * delta) - f.eval(x - c * delta);
  return (diff / (2.0 * c)) * delta.cwiseInverse();
}

Vector spsa_gradient(Objective& f, const Vector& x, double c, Rng& rng) {
  return spsa_gradient(f, x, c, sample_signs(rng, static_cast<int>(x.size())));
}

Vector hessian_vector_estimate(Objective& f, const Vector& x, const Vector& s, const DfpiConfig& cfg,
                               Rng& rng) {
  const double c = cfg.c_at(x);
  const double r = cfg.r_at(x);
  const Vector plus = x + r * s;
  const Vector minus = x - r * s;
  Vector g_plus, g_minus;
  if (cfg.estimator == GradientEstimator::kFiniteDifference) {
    g_plus = fd_gradient(f, plus, c);
    g_minus = fd_gradient(f, minus, c);
  } else {
    const Vector delta_plus = sample_signs(rng, static_cast<int>(x.size()));
    g_plus = spsa_gradient(f, plus, c, delta_plus);
    if (cfg.shared_delta) {
      g_minus = spsa_gradient(f, minus, c, delta_plus);
    } else {
      g_minus = spsa_gradient(f, minus, c, sample_signs(rng, static_cast<int>(x.size())));
    }
  }
  return (g_plus - g_minus) / (2.0 * r);
}

DfpiResult dfpi_direction_from(Objective& f, const Vector& x, const DfpiConfig& cfg, Vector start,
                               Rng& rng) {
  cfg.validate();
  if (x.size() != f.dim()) throw InvalidArgument("dfpi: point dimension does not match objective");
  require_same_dim(x, start, "dfpi start");
  require_finite(x, "dfpi point");
  const double start_norm = start.norm();
  if (!(start_norm > 0.0)) throw InvalidArgument("dfpi: start vector must be nonzero");

  DfpiResult out;
  out.direction = start / start_norm;
  if (cfg.keep_trace) {
    out.snapshots.reserve(cfg.t_dfpi + 1);
    out.snapshots.push_back(out.direction);
  }
  for (int t = 0; t < cfg.t_dfpi; ++t) {
    Vector next = out.direction - cfg.eta * hessian_vector_estimate(f, x, out.direction, cfg, rng);
    const double norm = next.norm();
    if (norm < kDegenerateNorm || !std::isfinite(norm)) {
      ++out.degenerate_steps;
    } else {
      out.direction = next / norm;
    }
    if (cfg.keep_trace) out.snapshots.push_back(out.direction);
  }
  return out;
}

DfpiResult dfpi_direction(Objective& f, const Vector& x, const DfpiConfig& cfg, Rng& rng) {
  Vector start = sample_unit_sphere(rng, static_cast<int>(x.size()));
  return dfpi_direction_from(f, x, cfg, std::move(start), rng);
}

double hvp_error_norm(Objective& f, const Vector& x, const Vector& s, const DfpiConfig& cfg) {
  if (!f.has_hessian()) throw UnsupportedOracle("hvp_error_norm: objective '" + f.name() + "' has no analytic Hessian");
  require_same_dim(x, s, "hvp_error_norm");
  DfpiConfig fd = cfg;
  fd.estimator = GradientEstimator::kFiniteDifference;
  Rng unused(0);
  const Vector estimate = hessian_vector_estimate(f, x, s, fd, unused);
  return (estimate - f.hessian(x) * s).norm();
}

}  // namespace curvesearch
