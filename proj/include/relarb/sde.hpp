#pragma once

#include <functional>

#include "relarb/domain.hpp"

namespace relarb {

// Monte Carlo simulation of admissible martingale laws: Euler-Maruyama paths
// under a state-dependent covariance control, stopped at the first exit from
// a compact domain. The sample minimum is an upper estimate of the essential
// infimum of the exit time (finite samples cannot undershoot it).

struct PathConfig {
  double dt = 0.0;
  int64_t n_paths = 0;
  double t_max = 0.0;
  uint64_t seed = 0;
  enum class Increments { Gaussian, RademacherBranch };
  Increments increment_scheme = Increments::Gaussian;
  bool record_radial_residuals = false;  // vs the origin, slope n - k
};

struct ExitStats {
  double min = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
  int64_t n_censored = 0;
  int64_t n_paths = 0;
  bool all_censored = false;
  Vec exit_times;         // sorted, censored excluded
  Vec radial_residuals;   // per path (all paths), when requested
};

using ControlFn = std::function<SymMatrix(const Vec&)>;

/// Projection I - yhat yhat^T on the leading n' coordinates (identity block
/// when that block vanishes), zero elsewhere. The explicit optimal diffusion
/// of the ball problem; trace n' - 1 off the degenerate point.
SymMatrix tangential_control(const Vec& y, int n_prime);

ControlFn make_tangential_control(int n_prime);

/// The skew generator S = (sqrt(lambda)/|grad|^2) (q grad^T - grad q^T);
/// S grad = sqrt(lambda) q when q is orthogonal to grad.
Mat skew_generator(const Vec& grad, const Vec& q, double lambda);

/// Columns S_i grad over the frame; Sigma Sigma^T = sum lambda_i q_i q_i^T
/// and grad^T Sigma = 0 for a frame orthogonal to grad.
Mat build_skew_sigma(const Vec& grad, const Mat& frame, const Vec& lambdas);

/// Euler-Maruyama exit times from dom under `control`, with the control's
/// admissibility checked (tolerance-relaxed) at every visited state. The
/// exit step is located by linear interpolation of the boundary slack.
ExitStats simulate_exit(const Domain& dom, const ProblemParams& params, const ControlFn& control,
                        const Vec& x0, const PathConfig& cfg);

struct PathRecord {
  Vec times;
  std::vector<Vec> states;
};

/// One recorded path (same stream as simulate_exit's `path_index`-th path).
PathRecord simulate_path(const Domain& dom, const ProblemParams& params, const ControlFn& control,
                         const Vec& x0, const PathConfig& cfg, int64_t path_index);

/// max over recorded steps of | |X(t)|^2 - |X(0)|^2 - (n-k) t |.
double radial_residual(const PathRecord& path, int n_minus_k);

/// {"min":..,"mean":..,"std":..,"q05":..,"q50":..,"q95":..,"n_censored":..,
///  "semantics":"sample-min upper-estimates ess-inf"} plus run metadata.
std::string exit_stats_json(const ExitStats& stats, const ProblemParams& params,
                            const PathConfig& cfg);

}  // namespace relarb
