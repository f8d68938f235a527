#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvesearch/core_math.hpp"
#include "curvesearch/objectives.hpp"

namespace curvesearch {

enum class GradientEstimator { kFiniteDifference, kSpsa };

const char* to_string(GradientEstimator e);
GradientEstimator gradient_estimator_from_string(const std::string& s);

/// Parameters of the derivative-free power iteration.
///
/// `c` (coordinate perturbation) and `r` (power-direction perturbation) are
/// absolute when set. When unset they scale with the evaluation point:
/// c = 1e-5 (1 + ||x||), r = 1e-3 (1 + ||x||).
struct DfpiConfig {
  std::optional<double> c;
  std::optional<double> r;
  double eta = 1e-2;
  int t_dfpi = 20;
  GradientEstimator estimator = GradientEstimator::kFiniteDifference;
  // SPSA only: reuse one sign vector for g+ and g- within an iteration.
  bool shared_delta = false;
  // Keep every iterate s^(0..T) in the result.
  bool keep_trace = false;

  // Throws InvalidArgument on non-positive or non-finite parameters.
  void validate() const;
  double c_at(const Vector& x) const;
  double r_at(const Vector& x) const;
  // Function evaluations consumed by one call at dimension d.
  std::int64_t eval_budget(int d) const;
};

// Central-difference gradient, exactly 2d evaluations.
Vector fd_gradient(Objective& f, const Vector& x, double c);

// SPSA gradient with a fresh Rademacher vector, exactly 2 evaluations:
// g_i = [f(x + c delta) - f(x - c delta)] / (2 c delta_i).
Vector spsa_gradient(Objective& f, const Vector& x, double c, Rng& rng);
Vector spsa_gradient(Objective& f, const Vector& x, double c, const Vector& delta);

// Hessian-vector product estimate (g+ - g-) / (2r), g+- the chosen gradient
// estimate at x +- r s.
Vector hessian_vector_estimate(Objective& f, const Vector& x, const Vector& s, const DfpiConfig& cfg,
                               Rng& rng);

struct DfpiResult {
  Vector direction;
  // s^(0), s^(1), ..., s^(T) when keep_trace is set; empty otherwise.
  std::vector<Vector> snapshots;
  // Iterations where the unnormalized update vanished and s was kept.
  int degenerate_steps = 0;
};

// Power iteration on (I - eta * Hessian) from a uniform random unit start.
DfpiResult dfpi_direction(Objective& f, const Vector& x, const DfpiConfig& cfg, Rng& rng);

// Same iteration from a caller-supplied unit start vector. `rng` is consumed
// only by the SPSA estimator.
DfpiResult dfpi_direction_from(Objective& f, const Vector& x, const DfpiConfig& cfg, Vector start,
                               Rng& rng);

// || FD estimate of H s - (analytic Hessian) s ||. Requires an analytic
// Hessian; throws UnsupportedOracle otherwise.
double hvp_error_norm(Objective& f, const Vector& x, const Vector& s, const DfpiConfig& cfg);

}  // namespace curvesearch
