#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "curvesearch/core_math.hpp"
#include "curvesearch/dfpi.hpp"
#include "curvesearch/objectives.hpp"
#include "curvesearch/trace.hpp"

namespace curvesearch {

enum class Algorithm { kRs, kRspi, kStp, kBds, kAhds };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Step radii of the two-step searches. sigma2 stays fixed; sigma1 is
// multiplied by rho after every t_sigma1 iterations.
struct ScheduleConfig {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 1.0;
  int t_sigma1 = 1;
  int max_iters = 100;

  void validate() const;
};

struct StpSchedule {
  enum class Kind { kHalveEvery, kInvSqrt };
  Kind kind = Kind::kHalveEvery;
  int period = 10;  // kHalveEvery: multiply eta by 0.5 after every `period` iterations

  // Step size for iteration k (0-based) given the previous one.
  double next(double eta0, double eta_k, int k) const;
};

// Sufficient-decrease forcing term rho(eta) = coefficient * eta^2.
struct Forcing {
  double coefficient = 0.0;
  double operator()(double eta) const { return coefficient * eta * eta; }
};

// Parameters shared by the STP, BDS and AHDS baselines.
struct BaselineConfig {
  double eta0 = 1.0;
  double eta_max = 10.0;
  double expand = 1.25;  // step growth on success (> 1)
  double shrink = 0.5;   // step contraction on failure (in (0, 1))
  Forcing forcing;
  StpSchedule stp_schedule;
  int max_iters = 100;

  void validate(Algorithm for_algorithm) const;
};

struct RunOptions {
  bool record_grad_norm = true;
  // When false, elapsed_ns is written as 0 so traces are byte-reproducible.
  bool record_time = true;
  std::uint64_t seed = 0;
  // Called with every AHDS step-7 Hessian approximation.
  std::function<void(const Matrix&)> ahds_hessian_observer;
};

RunTrace two_step_rs(Objective& f, const Vector& x0, const ScheduleConfig& sched, Rng& rng,
                     const RunOptions& opts = {});

RunTrace rspi(Objective& f, const Vector& x0, const ScheduleConfig& sched, const DfpiConfig& dfpi,
              Rng& rng, const RunOptions& opts = {});

RunTrace stp(Objective& f, const Vector& x0, const BaselineConfig& cfg, Rng& rng,
             const RunOptions& opts = {});

RunTrace bds(Objective& f, const Vector& x0, const BaselineConfig& cfg, const RunOptions& opts = {});

RunTrace ahds(Objective& f, const Vector& x0, const BaselineConfig& cfg, const RunOptions& opts = {});

// AHDS finite-difference Hessian from function values at x, x +- eta e_i and
// x + eta (e_i + e_j) (upper triangle of `pairs` used).
Matrix ahds_hessian_from_values(double f_x, const Vector& plus, const Vector& minus, const Matrix& pairs,
                                double eta);
// Convenience: evaluates the required points and applies the formula above.
Matrix ahds_hessian(Objective& f, const Vector& x, double eta);

// Evaluations of an AHDS iteration that runs the whole cascade.
std::int64_t ahds_full_iteration_evals(int d);

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::kRs;
  std::optional<ScheduleConfig> schedule;  // rs, rspi
  std::optional<DfpiConfig> dfpi;          // rspi
  std::optional<BaselineConfig> baseline;  // stp, bds, ahds
};

// Uniform dispatch. Throws ConfigError when the spec lacks the config block
// its algorithm needs.
RunTrace run(const AlgorithmSpec& spec, Objective& f, const Vector& x0, Rng& rng,
             const RunOptions& opts = {});

}  // namespace curvesearch
