#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace curvesearch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Throws InvalidArgument if any entry is NaN or infinite. `what` names the
// offending argument in the message.
void require_finite(const Vector& v, const char* what);
void require_finite(const Matrix& m, const char* what);
void require_same_dim(const Vector& a, const Vector& b, const char* what);

/// Portable, reproducible random stream.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of (seed, stream). Both the engine and seed_seq are fully
/// specified by the C++ standard, so a given (seed, stream) pair produces the
/// same bits on every conforming platform. Distributions are implemented
/// here rather than taken from <random>, whose algorithms are
/// implementation-defined:
///   - uniform():  top 53 bits of one draw, scaled to [0, 1)
///   - normal():   Marsaglia polar method, caching the second variate
///   - sign():     low bit of one draw mapped to {-1, +1}
///
/// A stream is single-owner. Use split() to derive independent child streams
/// for repetitions or sweep cells.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  double sign();
  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  // Child stream keyed by `child`; independent of this stream's position.
  Rng split(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Uniform sample on the unit sphere S^{d-1}: normalized i.i.d. standard
// normals, resampled if the draw is exactly zero.
Vector sample_unit_sphere(Rng& rng, int d);

// Vector of i.i.d. Rademacher signs.
Vector sample_signs(Rng& rng, int d);

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Rng& rng, int d);

struct EigPair {
  double value = 0.0;
  Vector vector;
};

struct EigenOptions {
  int max_dim = 512;
  int max_sweeps = 100;
};

// Full spectrum of a symmetric matrix by cyclic Jacobi rotations. Eigenvalues
// ascending; eigenvectors in matching columns, each sign-normalized so its
// first nonzero component is positive.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen_jacobi(const Matrix& h, double tol, const EigenOptions& opts = {});

// Smallest eigenvalue and its unit eigenvector (sign convention as above).
// Throws InvalidArgument for non-square, non-finite, oversize or
// non-symmetric (beyond tol * max|H_ij|) input; NumericalError if Jacobi does
// not converge within max_sweeps.
EigPair min_eigpair_symmetric(const Matrix& h, double tol, const EigenOptions& opts = {});

// Flips v in place so its first component with |v_i| > 0 is positive.
void normalize_sign(Eigen::Ref<Vector> v);

}  // namespace curvesearch
