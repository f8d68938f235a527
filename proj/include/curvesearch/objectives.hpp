#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvesearch/core_math.hpp"

namespace curvesearch {

// Assumption-1 constants. For objectives that are not globally Lipschitz
// smooth, the constants hold on the ball of radius `box_radius` (infinite
// means global).
struct Smoothness {
  double l1 = 0.0;
  double l2 = 0.0;
  double box_radius = 0.0;
};

/// A benchmark objective with an evaluation counter.
///
/// Every call to eval() increments the counter by exactly one. The analytic
/// gradient and Hessian are test/reporting oracles: they never touch the
/// counter. Copies carry the counter value; call reset_eval_count() on a
/// clone that starts a fresh run.
class Objective {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;

  Objective(std::string name, int param_d, int dim, EvalFn eval);

  double eval(const Vector& x);
  double operator()(const Vector& x) { return eval(x); }

  const std::string& name() const { return name_; }
  // The "d" the objective is parameterized by (quartic: number of x
  // variables, so dim() == param_d() + 1).
  int param_d() const { return param_d_; }
  int dim() const { return dim_; }

  std::int64_t eval_count() const { return eval_count_; }
  void reset_eval_count() { eval_count_ = 0; }

  std::optional<double> f_star() const { return f_star_; }
  const std::optional<Smoothness>& smoothness() const { return smoothness_; }
  const std::map<std::string, double>& metadata() const { return metadata_; }

  bool has_gradient() const { return static_cast<bool>(grad_); }
  bool has_hessian() const { return static_cast<bool>(hess_); }
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;

  Objective& with_f_star(double v);
  Objective& with_gradient(GradFn g);
  Objective& with_hessian(HessFn h);
  Objective& with_smoothness(Smoothness s);
  Objective& with_metadata(const std::string& key, double value);

 private:
  std::string name_;
  int param_d_;
  int dim_;
  EvalFn eval_;
  GradFn grad_;
  HessFn hess_;
  std::int64_t eval_count_ = 0;
  std::optional<double> f_star_;
  std::optional<Smoothness> smoothness_;
  std::map<std::string, double> metadata_;
};

// f(x_1..x_d, y) = 1/4 sum x_i^4 - y sum x_i + d/2 y^2, with y stored last.
// Strict saddle at the origin, minima at +-(1,..,1), f* = -d/4.
Objective quartic_saddle(int d);

// 10 d + sum (x_i^2 - 10 cos(2 pi x_i)); f* = 0 at the origin.
Objective rastrigin(int d);

// Positive root near 0.503 of x + 10 pi sin(2 pi x) = 0 (Rastrigin critical
// coordinate), solved by bisection to the last representable bit.
double rastrigin_critical_root();

// Saddle of the Rastrigin function: coordinates in `nonzero` set to the
// critical root, others zero. Requires 1 <= |nonzero| < d, distinct indices.
Vector rastrigin_saddle_init(int d, std::span<const int> nonzero);
// Same, with `count` distinct coordinates drawn uniformly from rng.
// The chosen indices are written to `chosen` when non-null.
Vector rastrigin_saddle_init(int d, int count, Rng& rng, std::vector<int>* chosen = nullptr);

struct LeadingEigProblem {
  Objective objective;
  Vector saddle_init;
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns match eigenvalues
  int resamples = 0;    // how many degenerate draws of A were rejected
};

// f(x) = ||x x^T - M||_F^2 with M = A^T A / d, A a d-by-d standard normal
// matrix drawn from rng. Saddle start sqrt(a_2) v_2; f* = sum_{i>=2} a_i^2.
LeadingEigProblem leading_eig(int d, Rng& rng);

struct QuadraticSaddleSpec {
  std::vector<double> eigenvalues;  // non-increasing, last one negative
  std::optional<Matrix> rotation;   // orthogonal U; identity when absent
};

// f(x) = x^T U^T diag(lambda) U x. Metadata: "gamma" = |lambda_d| and
// "L1" = max(lambda_1, |lambda_d|) in the convention of the escape bound.
Objective quadratic_saddle(const QuadraticSaddleSpec& spec);

// Unit eigenvector of the most negative eigenvalue: U^T e_d.
Vector quadratic_saddle_min_direction(const QuadraticSaddleSpec& spec);

}  // namespace curvesearch
