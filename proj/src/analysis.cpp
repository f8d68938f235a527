#include "curvesearch/analysis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "curvesearch/errors.hpp"
#include "parallel.hpp"

namespace curvesearch {

namespace {

constexpr double kIntegralTol = 1e-10;
constexpr double kIntegralSlack = 1e-9;

bool within(const BoundRow& row, double upper_cap) {
  return row.estimate >= row.lower - row.ci_halfwidth &&
         row.estimate <= std::min(row.upper, upper_cap) + row.ci_halfwidth;
}

bool is_worst_case(const std::vector<double>& lambdas) {
  for (std::size_t i = 1; i + 1 < lambdas.size(); ++i) {
    if (lambdas[i] != lambdas[0]) return false;
  }
  return true;
}

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

bool simpson_step(const std::function<double(double)>& g, double a, double b, double fa, double fm, double fb,
                  double whole, double tol, int depth, double& out) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) {
    out = left + right + diff / 15.0;
    return true;
  }
  if (depth <= 0) return false;
  double l = 0.0;
  double r = 0.0;
  if (!simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, l)) return false;
  if (!simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, r)) return false;
  out = l + r;
  return true;
}

}  // namespace

bool BoundReport::all_pass() const {
  for (const auto& row : rows) {
    if (!row.pass) return false;
  }
  return true;
}

double binomial_halfwidth_3sigma(double p_hat, std::int64_t trials) {
  if (trials <= 0) throw InvalidArgument("binomial_halfwidth_3sigma: trials must be positive");
  const double n = static_cast<double>(trials);
  const double p = std::max(p_hat, 1.0 / n);
  return 3.0 * std::sqrt(p * (1.0 - p) / n);
}

QuadraticSaddleSpec worst_case_saddle(int d, double lambda_d) {
  if (d < 2) throw InvalidArgument("worst_case_saddle: d must be >= 2");
  if (!(lambda_d < 0.0)) throw InvalidArgument("worst_case_saddle: lambda_d must be negative");
  QuadraticSaddleSpec spec;
  spec.eigenvalues.assign(static_cast<std::size_t>(d), 1.0);
  spec.eigenvalues.back() = lambda_d;
  return spec;
}

double escape_lower_bound(double gamma, double l1, int d) { return std::pow(gamma / (4.0 * l1), 0.5 * d); }

double escape_upper_bound_worst_case(double lambda_1, double gamma, int d) {
  const double varsigma2 = (lambda_1 + 0.5 * gamma) / (lambda_1 + gamma);
  return cap_upper_bound(d, std::sqrt(varsigma2));
}

BoundReport escape_probability_mc(const QuadraticSaddleSpec& spec, double sigma2, std::int64_t trials,
                                  Rng& rng) {
  if (trials < 10000) throw InvalidArgument("escape_probability_mc: trials must be >= 10000");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InvalidArgument("escape_probability_mc: sigma2 must be positive");
  }
  Objective f = quadratic_saddle(spec);
  const int d = f.dim();
  const double gamma = f.metadata().at("gamma");
  const double l1 = f.metadata().at("L1");

  BoundReport report;
  report.name = "escape_probability";
  report.param_names = {"d", "lambda_d", "sigma2"};
  if (d < 4) {
    report.warnings.push_back("d = " + std::to_string(d) + " < 4: the escape bounds assume d >= 4");
  }

  const double f0 = f.eval(Vector::Zero(d));
  const double threshold = -0.5 * gamma * sigma2 * sigma2;
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    const Vector s = sigma2 * sample_unit_sphere(rng, d);
    if (f.eval(s) - f0 <= threshold) ++hits;
  }

  BoundRow row;
  row.params = {static_cast<double>(d), spec.eigenvalues.back(), sigma2};
  row.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  row.ci_halfwidth = binomial_halfwidth_3sigma(row.estimate, trials);
  row.lower = escape_lower_bound(gamma, l1, d);
  row.upper = (d >= 3 && is_worst_case(spec.eigenvalues))
                  ? escape_upper_bound_worst_case(spec.eigenvalues.front(), gamma, d)
                  : 1.0;
  row.pass = within(row, 1.0);
  report.rows.push_back(row);
  return report;
}

BoundReport escape_probability_grid(const std::vector<int>& dims, const std::vector<double>& lambda_ds,
                                    const std::vector<double>& sigma2s, std::int64_t trials, const Rng& rng,
                                    int threads) {
  struct Cell {
    int d;
    double lambda_d;
    double sigma2;
  };
  std::vector<Cell> cells;
  for (int d : dims) {
    for (double l : lambda_ds) {
      for (double s : sigma2s) cells.push_back({d, l, s});
    }
  }
  std::vector<BoundReport> parts(cells.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    Rng cell_rng = rng.split(i);
    parts[i] = escape_probability_mc(worst_case_saddle(cells[i].d, cells[i].lambda_d), cells[i].sigma2, trials,
                                     cell_rng);
  });

  BoundReport report;
  report.name = "escape_probability";
  report.param_names = {"d", "lambda_d", "sigma2"};
  for (auto& part : parts) {
    report.rows.push_back(part.rows.front());
    for (auto& w : part.warnings) report.warnings.push_back(std::move(w));
  }
  return report;
}

double cap_lower_bound(int d, double varsigma) { return std::pow(0.5 * (1.0 - varsigma * varsigma), 0.5 * d); }

double cap_upper_bound(int d, double varsigma) {
  return 2.0 * std::sqrt(static_cast<double>(d - 2)) * std::pow(1.0 - varsigma * varsigma, 0.5 * d - 1.0);
}

BoundReport sphere_cap_bounds_check(int d, const std::vector<double>& varsigmas, std::int64_t trials, Rng& rng) {
  if (d < 4) throw InvalidArgument("sphere_cap_bounds_check: d must be >= 4");
  if (trials < 100000) throw InvalidArgument("sphere_cap_bounds_check: trials must be >= 100000");
  for (double s : varsigmas) {
    if (!(s >= 0.0 && s < 1.0)) throw InvalidArgument("sphere_cap_bounds_check: varsigma must lie in [0, 1)");
  }

  // All thresholds share one sample set.
  std::vector<std::int64_t> hits(varsigmas.size(), 0);
  for (std::int64_t i = 0; i < trials; ++i) {
    const double x1 = std::abs(sample_unit_sphere(rng, d)[0]);
    for (std::size_t j = 0; j < varsigmas.size(); ++j) {
      if (x1 > varsigmas[j]) ++hits[j];
    }
  }

  BoundReport report;
  report.name = "sphere_cap";
  report.param_names = {"d", "varsigma"};
  for (std::size_t j = 0; j < varsigmas.size(); ++j) {
    BoundRow row;
    row.params = {static_cast<double>(d), varsigmas[j]};
    row.estimate = static_cast<double>(hits[j]) / static_cast<double>(trials);
    row.ci_halfwidth = binomial_halfwidth_3sigma(row.estimate, trials);
    row.lower = cap_lower_bound(d, varsigmas[j]);
    row.upper = cap_upper_bound(d, varsigmas[j]);
    row.pass = within(row, 1.0);
    if (row.upper > 1.0) {
      std::ostringstream msg;
      msg << "d = " << d << ", varsigma = " << varsigmas[j] << ": upper bound " << row.upper
          << " is vacuous, checked against 1";
      report.warnings.push_back(msg.str());
    }
    report.rows.push_back(row);
  }
  return report;
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double tol, int max_depth) {
  if (!(tol > 0.0)) throw InvalidArgument("adaptive_simpson: tol must be positive");
  if (a == b) return 0.0;
  const double fa = g(a);
  const double fb = g(b);
  const double fm = g(0.5 * (a + b));
  double out = 0.0;
  if (!simpson_step(g, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth, out)) {
    std::ostringstream msg;
    msg << "adaptive_simpson: no convergence to " << tol << " on [" << a << ", " << b << "]";
    throw NumericalError(msg.str());
  }
  return out;
}

BoundReport integral_bounds_check(const std::vector<double>& alphas, const std::vector<double>& varsigmas) {
  BoundReport report;
  report.name = "integral";
  report.param_names = {"alpha", "varsigma"};
  for (double alpha : alphas) {
    if (!(alpha > 1.0)) throw InvalidArgument("integral_bounds_check: alpha must be > 1");
    for (double s : varsigmas) {
      if (!(s >= 0.0 && s < 1.0)) throw InvalidArgument("integral_bounds_check: varsigma must lie in [0, 1)");
      BoundRow row;
      row.params = {alpha, s};
      try {
        row.estimate = adaptive_simpson([alpha](double x) { return std::pow(1.0 - x * x, alpha); }, s, 1.0,
                                        kIntegralTol);
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "integral_bounds_check at alpha = " << alpha << ", varsigma = " << s << ": " << e.what();
        throw NumericalError(msg.str());
      }
      row.lower = std::pow(0.5 * (1.0 - s * s), alpha + 1.0);
      row.upper = std::pow(1.0 - s * s, alpha);
      row.ci_halfwidth = kIntegralSlack;
      row.pass = within(row, row.upper);
      report.rows.push_back(row);
    }
  }
  return report;
}

OptimalRadii optimal_radii(double epsilon, double l1, double l2, int d) {
  if (!(epsilon > 0.0) || !(l1 > 0.0) || !(l2 > 0.0) || d < 1) {
    throw InvalidArgument("optimal_radii: epsilon, L1, L2 and d must be positive");
  }
  const double eps23 = std::cbrt(epsilon * epsilon);
  return {epsilon / (l1 * std::sqrt(2.0 * std::numbers::pi * d)), eps23 / (2.0 * l2), eps23};
}

std::vector<AlignmentPoint> dfpi_alignment_trace(const QuadraticSaddleSpec& spec, const DfpiConfig& cfg, Rng& rng,
                                                 double sigma2) {
  Objective f = quadratic_saddle(spec);
  const int d = f.dim();
  const Vector v = quadratic_saddle_min_direction(spec);
  Vector start = sample_unit_sphere(rng, d);
  if (spec.rotation) start = spec.rotation->transpose() * start;

  DfpiConfig traced = cfg;
  traced.keep_trace = true;
  const DfpiResult res = dfpi_direction_from(f, Vector::Zero(d), traced, start, rng);

  std::vector<AlignmentPoint> out;
  out.reserve(res.snapshots.size());
  for (std::size_t t = 0; t < res.snapshots.size(); ++t) {
    const Vector& s = res.snapshots[t];
    out.push_back({static_cast<int>(t), std::abs(s.dot(v)), f.eval(sigma2 * s)});
  }
  return out;
}

}  // namespace curvesearch
