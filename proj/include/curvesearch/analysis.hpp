#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curvesearch/core_math.hpp"
#include "curvesearch/dfpi.hpp"
#include "curvesearch/objectives.hpp"

namespace curvesearch {

struct BoundRow {
  std::vector<double> params;  // values for BoundReport::param_names
  double lower = 0.0;
  double estimate = 0.0;
  double upper = 0.0;
  double ci_halfwidth = 0.0;  // 3 sigma binomial for Monte-Carlo rows
  bool pass = false;
};

/// Analytic bounds next to a numerical estimate on a parameter grid.
struct BoundReport {
  std::string name;
  std::vector<std::string> param_names;
  std::vector<BoundRow> rows;
  std::vector<std::string> warnings;

  bool all_pass() const;
};

// Three standard deviations of a binomial proportion. A zero estimate is
// widened to one success so the interval is never degenerate.
double binomial_halfwidth_3sigma(double p_hat, std::int64_t trials);

// Worst-case saddle spectrum: lambda_1 = ... = lambda_{d-1} = 1, lambda_d.
QuadraticSaddleSpec worst_case_saddle(int d, double lambda_d);

// Lower bound (gamma / (4 L1))^{d/2} on the curvature-step decrease probability.
double escape_lower_bound(double gamma, double l1, int d);
// Upper bound for the worst-case spectrum via the cap bound at
// varsigma^2 = (lambda_1 + gamma/2) / (lambda_1 + gamma).
double escape_upper_bound_worst_case(double lambda_1, double gamma, int d);

// Pr[f(sigma2 s) - f(0) <= -gamma sigma2^2 / 2] for s uniform on the sphere.
// One row with params (d, lambda_d, sigma2). The upper bound is the
// worst-case cap bound when lambda_1..lambda_{d-1} coincide and 1 otherwise.
// Requires trials >= 1e4; d < 4 adds a warning.
BoundReport escape_probability_mc(const QuadraticSaddleSpec& spec, double sigma2, std::int64_t trials,
                                  Rng& rng);

// Worst-case spectra over dims x lambda_ds x sigma2s. Cell i uses rng.split(i).
BoundReport escape_probability_grid(const std::vector<int>& dims, const std::vector<double>& lambda_ds,
                                    const std::vector<double>& sigma2s, std::int64_t trials,
                                    const Rng& rng, int threads = 1);

// Cap bounds [(1 - s^2)/2]^{d/2} <= Pr[|x_1| > s] <= 2 sqrt(d-2) (1 - s^2)^{d/2-1}.
double cap_lower_bound(int d, double varsigma);
double cap_upper_bound(int d, double varsigma);

// Empirical Pr[|x_1| > varsigma] for x uniform on S^{d-1}, one row per
// varsigma with params (d, varsigma). Requires d >= 4 and trials >= 1e5.
// Rows whose upper bound exceeds 1 are checked against 1 and noted.
BoundReport sphere_cap_bounds_check(int d, const std::vector<double>& varsigmas, std::int64_t trials,
                                    Rng& rng);

// Adaptive Simpson quadrature on [a, b]. Throws NumericalError when the
// recursion depth is exhausted before reaching `tol`.
double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double tol,
                        int max_depth = 60);

// Brackets [(1 - s^2)/2]^{alpha+1} <= int_s^1 (1 - x^2)^alpha dx <= (1 - s^2)^alpha
// with params (alpha, varsigma), slack 1e-9, quadrature tolerance 1e-10.
BoundReport integral_bounds_check(const std::vector<double>& alphas, const std::vector<double>& varsigmas);

struct OptimalRadii {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double gamma = 0.0;
};

// sigma1 = eps / (L1 sqrt(2 pi d)), sigma2 = eps^{2/3} / (2 L2), gamma = eps^{2/3}.
OptimalRadii optimal_radii(double epsilon, double l1, double l2, int d);

struct AlignmentPoint {
  int t = 0;
  double alignment = 0.0;  // |<s_t, v_d>|
  double f_value = 0.0;    // f(sigma2 s_t)
};

// DFPI at the saddle x = 0 of a quadratic. The random start is drawn in the
// eigenbasis and rotated by U^T, so rotated and axis-aligned spectra give the
// same trace for the same rng state.
std::vector<AlignmentPoint> dfpi_alignment_trace(const QuadraticSaddleSpec& spec, const DfpiConfig& cfg,
                                                 Rng& rng, double sigma2 = 1.0);

}  // namespace curvesearch
