#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curvesearch/errors.hpp"
#include "curvesearch/objectives.hpp"
#include "oracles.hpp"

namespace cs = curvesearch;
using cs::Matrix;
using cs::Vector;

namespace {

constexpr double kPi = std::numbers::pi;

// Central-difference gradient error must shrink at least 3x when c halves
// (second-order accuracy), unless already at rounding level.
void expect_second_order_gradient(cs::Objective& f, const Vector& x) {
  auto fd = [&](double c) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector up = x, down = x;
      up[i] += c;
      down[i] -= c;
      g[i] = (f(up) - f(down)) / (2 * c);
    }
    return g;
  };
  const Vector exact = f.gradient(x);
  const double e1 = (fd(1e-2) - exact).norm();
  const double e2 = (fd(5e-3) - exact).norm();
  if (e1 > 1e-9) {
    EXPECT_LE(e2 * 3.0, e1) << f.name();
  }
}

}  // namespace

TEST(Quartic, ValuesAtSaddleAndMinima) {
  auto f0 = cs::quartic_saddle(3);
  EXPECT_EQ(f0.dim(), 4);
  EXPECT_EQ(f0(Vector::Zero(4)), 0.0);
  auto f4 = cs::quartic_saddle(4);
  EXPECT_DOUBLE_EQ(f4(Vector::Ones(5)), -1.0);
  auto f10 = cs::quartic_saddle(10);
  EXPECT_DOUBLE_EQ(f10(-Vector::Ones(11)), -2.5);
  EXPECT_DOUBLE_EQ(*f10.f_star(), -2.5);
}

TEST(Quartic, GradientMatchesFormulaAndFiniteDifferences) {
  auto f = cs::quartic_saddle(5);
  cs::Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.normal();
    const Vector g = f.gradient(x);
    const double y = x[5];
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(g[i], x[i] * x[i] * x[i] - y, 1e-14);
    EXPECT_NEAR(g[5], -x.head(5).sum() + 5 * y, 1e-13);
    expect_second_order_gradient(f, x);
    const Matrix h_fd = oracle::fd_jacobian([&](const Vector& z) { return f.gradient(z); }, x, 1e-5);
    EXPECT_LE((h_fd - f.hessian(x)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Quartic, SaddleHasOneNegativeEigenvalue) {
  auto f = cs::quartic_saddle(100);
  const Vector ev = oracle::eigenvalues(f.hessian(Vector::Zero(101)));
  const double lo = (100.0 - std::sqrt(100.0 * 100.0 + 400.0)) / 2.0;
  EXPECT_NEAR(ev[0], lo, 1e-10);
  EXPECT_GT(ev[1], -1e-12);
}

TEST(Quartic, EvaluationsNeverBelowOptimum) {
  auto f = cs::quartic_saddle(7);
  cs::Rng rng(2);
  for (int k = 0; k < 2000; ++k) {
    Vector x(8);
    for (int i = 0; i < 8; ++i) x[i] = 2.0 * rng.normal();
    EXPECT_GE(f(x), *f.f_star() - 1e-9);
  }
}

TEST(Rastrigin, Values) {
  auto f5 = cs::rastrigin(5);
  EXPECT_EQ(f5(Vector::Zero(5)), 0.0);
  auto f3 = cs::rastrigin(3);
  Vector x = Vector::Zero(3);
  x[0] = 1.0;
  EXPECT_NEAR(f3(x), 1.0, 1e-12);
}

TEST(Rastrigin, GradientAndHessianOracles) {
  auto f = cs::rastrigin(6);
  cs::Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.uniform() * 2 - 1;
    const Vector g = f.gradient(x);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(g[i], 2 * x[i] + 20 * kPi * std::sin(2 * kPi * x[i]), 1e-12);
    const Matrix h = f.hessian(x);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(h(i, i), 2 + 40 * kPi * kPi * std::cos(2 * kPi * x[i]), 1e-10);
    expect_second_order_gradient(f, x);
  }
  EXPECT_NEAR(f.smoothness()->l1, 2 + 40 * kPi * kPi, 1e-12);
  EXPECT_NEAR(f.smoothness()->l2, 80 * kPi * kPi * kPi, 1e-9);
}

TEST(Rastrigin, CriticalRoot) {
  const double root = cs::rastrigin_critical_root();
  // Independent bisection in long double.
  long double lo = 0.5L, hi = 0.51L;
  auto g = [](long double x) { return x + 10.0L * std::numbers::pi_v<long double> * std::sin(2.0L * std::numbers::pi_v<long double> * x); };
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
  }
  EXPECT_NEAR(root, static_cast<double>(lo), 1e-15);
  EXPECT_NEAR(root, 0.503, 5e-4);
}

TEST(Rastrigin, SaddleInitIsStationaryWithNegativeCurvature) {
  auto f = cs::rastrigin(10);
  const int coords[] = {3};
  const Vector x = cs::rastrigin_saddle_init(10, coords);
  EXPECT_NEAR(x[3], 0.5030, 5e-4);
  EXPECT_LE(f.gradient(x).norm(), 1e-9);
  const Vector ev = f.hessian(x).diagonal();
  EXPECT_EQ((ev.array() < 0).count(), 1);
  EXPECT_NEAR(ev[3], 2 + 40 * kPi * kPi * std::cos(2 * kPi * cs::rastrigin_critical_root()), 1e-9);

  const int two[] = {0, 1};
  const Vector x2 = cs::rastrigin_saddle_init(3, two);
  EXPECT_EQ((cs::rastrigin(3).hessian(x2).diagonal().array() < 0).count(), 2);
}

TEST(Rastrigin, SaddleInitValueAtDimension200) {
  auto f = cs::rastrigin(200);
  cs::Rng rng(4);
  std::vector<int> chosen;
  const Vector x = cs::rastrigin_saddle_init(200, 1, rng, &chosen);
  ASSERT_EQ(chosen.size(), 1u);
  EXPECT_EQ(x[chosen[0]], cs::rastrigin_critical_root());
  const double r = cs::rastrigin_critical_root();
  EXPECT_NEAR(f(x), 10 + r * r - 10 * std::cos(2 * kPi * r), 1e-11);
  EXPECT_NEAR(f(x), 20.251272990990113, 1e-10);
}

TEST(Rastrigin, SaddleInitRejectsBadIndexSets) {
  const int all[] = {0, 1};
  EXPECT_THROW(cs::rastrigin_saddle_init(2, all), cs::InvalidArgument);
  const int dup[] = {1, 1};
  EXPECT_THROW(cs::rastrigin_saddle_init(5, dup), cs::InvalidArgument);
  const int out[] = {7};
  EXPECT_THROW(cs::rastrigin_saddle_init(5, out), cs::InvalidArgument);
  EXPECT_THROW(cs::rastrigin_saddle_init(5, std::span<const int>{}), cs::InvalidArgument);
}

TEST(LeadingEig, ZeroOptimumAndSaddle) {
  cs::Rng rng(5);
  auto p = cs::leading_eig(20, rng);
  auto& f = p.objective;
  const Vector& a = p.eigenvalues;
  EXPECT_NEAR(f(Vector::Zero(20)), a.squaredNorm(), 1e-10);
  const double f_star = a.tail(19).squaredNorm();
  EXPECT_NEAR(*f.f_star(), f_star, 1e-10);

  const Vector x1 = std::sqrt(a[0]) * p.eigenvectors.col(0);
  EXPECT_NEAR(f(x1), f_star, 1e-10);
  EXPECT_LE(f.gradient(x1).norm(), 1e-10);

  EXPECT_LE(f.gradient(p.saddle_init).norm(), 1e-8);
  const Matrix h_fd =
      oracle::fd_jacobian([&](const Vector& z) { return f.gradient(z); }, p.saddle_init, 1e-5);
  EXPECT_LT(oracle::eigenvalues(h_fd)[0], 0.0);
  EXPECT_LE((h_fd - f.hessian(p.saddle_init)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(LeadingEig, SpectrumMatchesIndependentSolver) {
  cs::Rng rng(6);
  auto p = cs::leading_eig(15, rng);
  // The Hessian at 0 is -4M.
  const Matrix m = -0.25 * p.objective.hessian(Vector::Zero(15));
  Vector ref = oracle::eigenvalues(m).reverse();
  EXPECT_LE((ref - p.eigenvalues).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(p.eigenvalues[0] - p.eigenvalues[1], 1e-10);
  expect_second_order_gradient(p.objective, p.saddle_init + 0.1 * Vector::Ones(15));
}

TEST(LeadingEig, EvaluationsNeverBelowOptimum) {
  cs::Rng rng(7);
  auto p = cs::leading_eig(8, rng);
  for (int k = 0; k < 2000; ++k) {
    Vector x(8);
    for (int i = 0; i < 8; ++i) x[i] = 2 * rng.normal();
    EXPECT_GE(p.objective(x), *p.objective.f_star() - 1e-9);
  }
}

TEST(QuadraticSaddle, Examples) {
  cs::QuadraticSaddleSpec spec{{1, 1, 1, -1}, std::nullopt};
  auto f = cs::quadratic_saddle(spec);
  Vector e4 = Vector::Zero(4);
  e4[3] = 1;
  EXPECT_EQ(f(e4), -1.0);
  EXPECT_EQ(f(Vector::Zero(4)), 0.0);
  EXPECT_EQ(f.gradient(Vector::Zero(4)).norm(), 0.0);
  EXPECT_EQ(f.metadata().at("gamma"), 1.0);
  EXPECT_EQ(f.metadata().at("L1"), 1.0);

  cs::Rng rng(8);
  cs::QuadraticSaddleSpec wide{std::vector<double>(10, 1.0), std::nullopt};
  wide.eigenvalues.back() = -1.0;
  auto g = cs::quadratic_saddle(wide);
  for (int k = 0; k < 100; ++k) {
    const Vector s = cs::sample_unit_sphere(rng, 10);
    EXPECT_NEAR(g(s), 1 - 2 * s[9] * s[9], 1e-14);
  }
}

TEST(QuadraticSaddle, RotatedMinDirection) {
  cs::Rng rng(9);
  cs::QuadraticSaddleSpec spec{{3, 2, 0.5, -0.7}, cs::random_orthogonal(rng, 4)};
  auto f = cs::quadratic_saddle(spec);
  const Vector v = cs::quadratic_saddle_min_direction(spec);
  for (double t : {0.5, 1.0, 3.0}) EXPECT_NEAR(f(t * v), -0.7 * t * t, 1e-12);
  EXPECT_NEAR(oracle::eigenvalues(f.hessian(Vector::Zero(4)))[0], -1.4, 1e-12);
}

TEST(QuadraticSaddle, RejectsNonSaddlesAndBadRotations) {
  EXPECT_THROW(cs::quadratic_saddle({{1, 1, 0}, std::nullopt}), cs::InvalidArgument);
  EXPECT_THROW(cs::quadratic_saddle({{1, 2, -1}, std::nullopt}), cs::InvalidArgument);
  Matrix notorth = Matrix::Identity(3, 3);
  notorth(0, 1) = 0.1;
  EXPECT_THROW(cs::quadratic_saddle({{1, 1, -1}, notorth}), cs::InvalidArgument);
}

TEST(Objective, CounterIncrementsOncePerEvaluation) {
  auto f = cs::rastrigin(4);
  EXPECT_EQ(f.eval_count(), 0);
  for (int i = 0; i < 5; ++i) f(Vector::Zero(4));
  f.gradient(Vector::Zero(4));
  f.hessian(Vector::Zero(4));
  EXPECT_EQ(f.eval_count(), 5);
  auto copy = f;
  EXPECT_EQ(copy.eval_count(), 5);
  copy.reset_eval_count();
  EXPECT_EQ(copy.eval_count(), 0);
  EXPECT_EQ(f.eval_count(), 5);
}

TEST(Objective, RejectsWrongDimensionAndNonFiniteInput) {
  auto f = cs::rastrigin(4);
  EXPECT_THROW(f(Vector::Zero(3)), cs::InvalidArgument);
  Vector x = Vector::Zero(4);
  x[2] = std::nan("");
  EXPECT_THROW(f(x), cs::InvalidArgument);
}

TEST(Objective, MissingOraclesThrow) {
  auto f = oracle::from_fn("plain", 2, [](const Vector& x) { return x.sum(); });
  EXPECT_FALSE(f.has_gradient());
  EXPECT_THROW(f.gradient(Vector::Zero(2)), cs::UnsupportedOracle);
  EXPECT_THROW(f.hessian(Vector::Zero(2)), cs::UnsupportedOracle);
}
