#include "curvesearch/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>

#include "curvesearch/errors.hpp"

namespace curvesearch {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_dim(int d, int min, const char* what) {
  if (d < min) {
    throw InvalidArgument(std::string(what) + ": dimension must be >= " + std::to_string(min));
  }
}

}  // namespace

Objective::Objective(std::string name, int param_d, int dim, EvalFn eval)
    : name_(std::move(name)), param_d_(param_d), dim_(dim), eval_(std::move(eval)) {
  if (dim_ < 1) throw InvalidArgument("objective: dimension must be >= 1");
}

double Objective::eval(const Vector& x) {
  if (x.size() != dim_) {
    throw InvalidArgument(name_ + ": expected dimension " + std::to_string(dim_) + ", got " +
                          std::to_string(x.size()));
  }
  require_finite(x, name_.c_str());
  ++eval_count_;
  return eval_(x);
}

Vector Objective::gradient(const Vector& x) const {
  if (!grad_) throw UnsupportedOracle(name_ + ": no analytic gradient");
  return grad_(x);
}

Matrix Objective::hessian(const Vector& x) const {
  if (!hess_) throw UnsupportedOracle(name_ + ": no analytic Hessian");
  return hess_(x);
}

Objective& Objective::with_f_star(double v) {
  f_star_ = v;
  return *this;
}
Objective& Objective::with_gradient(GradFn g) {
  grad_ = std::move(g);
  return *this;
}
Objective& Objective::with_hessian(HessFn h) {
  hess_ = std::move(h);
  return *this;
}
Objective& Objective::with_smoothness(Smoothness s) {
  smoothness_ = s;
  return *this;
}
Objective& Objective::with_metadata(const std::string& key, double value) {
  metadata_[key] = value;
  return *this;
}

Objective quartic_saddle(int d) {
  require_positive_dim(d, 1, "quartic_saddle");
  const double dd = d;
  Objective f("quartic", d, d + 1, [d, dd](const Vector& v) {
    const auto x = v.head(d);
    const double y = v[d];
    return 0.25 * x.array().pow(4).sum() - y * x.sum() + 0.5 * dd * y * y;
  });
  f.with_f_star(-dd / 4.0)
      .with_gradient([d, dd](const Vector& v) {
        Vector g(d + 1);
        const double y = v[d];
        g.head(d) = v.head(d).array().cube() - y;
        g[d] = -v.head(d).sum() + dd * y;
        return g;
      })
      .with_hessian([d, dd](const Vector& v) {
        Matrix h = Matrix::Zero(d + 1, d + 1);
        for (int i = 0; i < d; ++i) {
          h(i, i) = 3.0 * v[i] * v[i];
          h(i, d) = -1.0;
          h(d, i) = -1.0;
        }
        h(d, d) = dd;
        return h;
      });
  // On the ball of radius R: ||H|| <= 3R^2 + ||[[0, -1^T], [-1, d]]||, L2 = 6R.
  const double radius = 2.0 * std::sqrt(dd + 1.0);
  const double coupling = 0.5 * (dd + std::sqrt(dd * dd + 4.0 * dd));
  f.with_smoothness({3.0 * radius * radius + coupling, 6.0 * radius, radius});
  return f;
}

Objective rastrigin(int d) {
  require_positive_dim(d, 1, "rastrigin");
  Objective f("rastrigin", d, d, [d](const Vector& x) {
    double s = 10.0 * d;
    for (int i = 0; i < d; ++i) s += x[i] * x[i] - 10.0 * std::cos(2.0 * kPi * x[i]);
    return s;
  });
  f.with_f_star(0.0)
      .with_gradient([](const Vector& x) -> Vector {
        return 2.0 * x.array() + 20.0 * kPi * (2.0 * kPi * x.array()).sin();
      })
      .with_hessian([](const Vector& x) -> Matrix {
        Vector diag = 2.0 + 40.0 * kPi * kPi * (2.0 * kPi * x.array()).cos();
        return diag.asDiagonal();
      })
      .with_smoothness({2.0 + 40.0 * kPi * kPi, 80.0 * kPi * kPi * kPi,
                        std::numeric_limits<double>::infinity()});
  return f;
}

double rastrigin_critical_root() {
  auto h = [](double x) { return x + 10.0 * kPi * std::sin(2.0 * kPi * x); };
  double lo = 0.5;   // h > 0
  double hi = 0.51;  // h < 0
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) > 0 ? lo : hi) = mid;
  }
  return std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
}

Vector rastrigin_saddle_init(int d, std::span<const int> nonzero) {
  require_positive_dim(d, 2, "rastrigin_saddle_init");
  if (nonzero.empty()) throw InvalidArgument("rastrigin_saddle_init: index set is empty");
  if (static_cast<int>(nonzero.size()) >= d) {
    throw InvalidArgument(
        "rastrigin_saddle_init: |I| must be < d (all coordinates nonzero is a local maximizer)");
  }
  std::set<int> seen;
  Vector x = Vector::Zero(d);
  const double root = rastrigin_critical_root();
  for (int i : nonzero) {
    if (i < 0 || i >= d) throw InvalidArgument("rastrigin_saddle_init: index out of range");
    if (!seen.insert(i).second) throw InvalidArgument("rastrigin_saddle_init: duplicate index");
    x[i] = root;
  }
  return x;
}

Vector rastrigin_saddle_init(int d, int count, Rng& rng, std::vector<int>* chosen) {
  if (count < 1 || count >= d) {
    throw InvalidArgument("rastrigin_saddle_init: need 1 <= count < d");
  }
  // Partial Fisher-Yates over 0..d-1.
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  for (int k = 0; k < count; ++k) {
    const auto j = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - k)));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  if (chosen) *chosen = idx;
  return rastrigin_saddle_init(d, idx);
}

LeadingEigProblem leading_eig(int d, Rng& rng) {
  require_positive_dim(d, 2, "leading_eig");
  constexpr int kMaxDraws = 16;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
    Matrix m = (a.transpose() * a) / static_cast<double>(d);
    m = 0.5 * (m + m.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) continue;
    const Vector values = es.eigenvalues().reverse();
    const Matrix vectors = es.eigenvectors().rowwise().reverse();
    if (values[0] - values[1] <= 1e-10) continue;  // degenerate top pair: redraw

    const double m_frob2 = m.squaredNorm();
    const double f_star = values.tail(d - 1).squaredNorm();
    Objective f("leading-eig", d, d, [m, m_frob2](const Vector& x) {
      const double xx = x.squaredNorm();
      return xx * xx - 2.0 * x.dot(m * x) + m_frob2;
    });
    f.with_f_star(f_star)
        .with_gradient([m](const Vector& x) -> Vector { return 4.0 * (x.squaredNorm() * x - m * x); })
        .with_hessian([m, d](const Vector& x) -> Matrix {
          return 4.0 * (x.squaredNorm() * Matrix::Identity(d, d) + 2.0 * x * x.transpose() - m);
        });
    // Hessian bound on the ball of radius R: 4 (3 R^2 + ||M||), L2 = 24 R.
    const double radius = 2.0 * std::sqrt(values[0]);
    f.with_smoothness({4.0 * (3.0 * radius * radius + values[0]), 24.0 * radius, radius});

    Vector v2 = vectors.col(1);
    normalize_sign(v2);
    Vector saddle = std::sqrt(values[1]) * v2;
    return {std::move(f), std::move(saddle), values, vectors, attempt};
  }
  throw NumericalError("leading_eig: could not draw a matrix with a simple top eigenvalue");
}

Objective quadratic_saddle(const QuadraticSaddleSpec& spec) {
  const auto& lam = spec.eigenvalues;
  if (lam.empty()) throw InvalidArgument("quadratic_saddle: no eigenvalues");
  for (std::size_t i = 1; i < lam.size(); ++i) {
    if (lam[i] > lam[i - 1]) throw InvalidArgument("quadratic_saddle: eigenvalues must be non-increasing");
  }
  if (!(lam.back() < 0.0)) throw InvalidArgument("quadratic_saddle: not a saddle (lambda_d >= 0)");
  const int d = static_cast<int>(lam.size());
  const Vector diag = Eigen::Map<const Vector>(lam.data(), d);

  Matrix q = diag.asDiagonal();
  if (spec.rotation) {
    const Matrix& u = *spec.rotation;
    if (u.rows() != d || u.cols() != d) throw InvalidArgument("quadratic_saddle: rotation has wrong shape");
    require_finite(u, "quadratic_saddle rotation");
    if ((u.transpose() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
      throw InvalidArgument("quadratic_saddle: rotation is not orthogonal within 1e-10");
    }
    q = u.transpose() * diag.asDiagonal() * u;
    q = 0.5 * (q + q.transpose());
  }

  const bool diagonal = !spec.rotation.has_value();
  Objective f("quadratic-saddle", d, d, [q, diag, diagonal](const Vector& x) {
    if (diagonal) return (diag.array() * x.array().square()).sum();
    return x.dot(q * x);
  });
  const double gamma = -lam.back();
  const double max_abs = std::max(std::abs(lam.front()), gamma);
  f.with_gradient([q](const Vector& x) -> Vector { return 2.0 * (q * x); })
      .with_hessian([q](const Vector&) -> Matrix { return 2.0 * q; })
      .with_smoothness({2.0 * max_abs, 0.0, std::numeric_limits<double>::infinity()})
      .with_metadata("gamma", gamma)
      .with_metadata("L1", std::max(lam.front(), gamma));
  return f;
}

Vector quadratic_saddle_min_direction(const QuadraticSaddleSpec& spec) {
  const int d = static_cast<int>(spec.eigenvalues.size());
  Vector e = Vector::Unit(d, d - 1);
  if (spec.rotation) return spec.rotation->transpose() * e;
  return e;
}

}  // namespace curvesearch
