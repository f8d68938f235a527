#include "curvesearch/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>

#include "curvesearch/errors.hpp"

namespace curvesearch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

double Rng::sign() { return (engine_() & 1U) ? 1.0 : -1.0; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below: n must be positive");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

Rng Rng::split(std::uint64_t child) const {
  return Rng(seed_, splitmix64(stream_ ^ splitmix64(child + 0x632BE59BD9B4E019ULL)));
}

Vector sample_unit_sphere(Rng& rng, int d) {
  if (d < 1) throw InvalidArgument("sample_unit_sphere: dimension must be >= 1");
  Vector v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  v /= norm;
  return v;
}

Vector sample_signs(Rng& rng, int d) {
  if (d < 1) throw InvalidArgument("sample_signs: dimension must be >= 1");
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.sign();
  return v;
}

void normalize_sign(Eigen::Ref<Vector> v) {
  // Components below this are treated as rounding noise around zero.
  const double floor = 1e-10 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > floor) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

Matrix random_orthogonal(Rng& rng, int d) {
  if (d < 1) throw InvalidArgument("random_orthogonal: dimension must be >= 1");
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix column signs against diag(R) so the distribution is Haar.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

SymmetricEigen symmetric_eigen_jacobi(const Matrix& h, double tol, const EigenOptions& opts) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw InvalidArgument("symmetric eigensolver: matrix must be square and non-empty");
  }
  if (h.rows() > opts.max_dim) {
    throw InvalidArgument("symmetric eigensolver: dimension " + std::to_string(h.rows()) +
                          " exceeds cap " + std::to_string(opts.max_dim));
  }
  require_finite(h, "symmetric eigensolver");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw InvalidArgument("symmetric eigensolver: matrix is not symmetric within tolerance");
  }

  const Eigen::Index n = h.rows();
  Matrix a = 0.5 * (h + h.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double frob = a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  bool converged = n == 1;
  for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
    if (off_norm() <= 1e-15 * frob) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Negligible against both diagonal entries: annihilate without rotating.
        if (sweep > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        Vector col_p = a.col(p);
        a.col(p) = c * col_p - s * a.col(q);
        a.col(q) = s * col_p + c * a.col(q);
        Eigen::RowVectorXd row_p = a.row(p);
        a.row(p) = c * row_p - s * a.row(q);
        a.row(q) = s * row_p + c * a.row(q);
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        Vector vp = v.col(p);
        v.col(p) = c * vp - s * v.col(q);
        v.col(q) = s * vp + c * v.col(q);
      }
    }
  }
  if (!converged && off_norm() > 1e-15 * frob) {
    throw NumericalError("symmetric eigensolver: Jacobi sweeps did not converge");
  }

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]).normalized();
    normalize_sign(out.vectors.col(k));
  }
  return out;
}

EigPair min_eigpair_symmetric(const Matrix& h, double tol, const EigenOptions& opts) {
  const SymmetricEigen eig = symmetric_eigen_jacobi(h, tol, opts);
  return {eig.values[0], eig.vectors.col(0)};
}

}  // namespace curvesearch
