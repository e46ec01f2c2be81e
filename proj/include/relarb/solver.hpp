#pragma once

#include "relarb/grid.hpp"

namespace relarb {

// Monotone wide-stencil value iteration for the exit-time value function:
// per node, candidate orthonormal frames (orthogonal to the discrete
// gradient when it is resolvable) and {0,1,L} eigenvalue patterns over
// trinomial samples at distance rho, iterated from zero until stationary.

struct SolveConfig {
  double delta = 0.0;
  double rho = 0.0;        // 0 resolves to max(delta, 0.5*sqrt(delta * ball diameter))
  int n_random_frames = 8;
  double tol_iter = 0.0;   // 0 resolves to 1e-7 * v_bound
  int64_t max_iter = 0;    // 0 resolves to ceil(10 * v_bound / delta^2)
  uint64_t seed = 0;
  double tol_grad = 0.0;   // 0 resolves to 10 * delta
  bool policy_iteration = false;  // accelerator; identical fixed point
};

/// Fill the zero defaults from the domain scale. Validates rho >= delta.
SolveConfig resolve_config(SolveConfig cfg, const Domain& dom, const ProblemParams& params);

struct PolicyEntry {
  Vec gradient;  // discrete gradient used for the frame constraint
  Mat frame;     // n x f orthonormal directions of the chosen frame
  Vec lambdas;   // per-direction weights in [0, L]
};

struct ControlPolicy {
  std::vector<int32_t> nodes;  // interior linear indices, aligned with entries
  std::vector<PolicyEntry> entries;

  SymMatrix control_at(size_t i) const;
};

struct SolveResult {
  ValueField field;
  ControlPolicy policy;
  Vec residual_history;
  double min_update_gap = 0.0;  // most negative single-sweep change observed
  SolveConfig config;           // resolved values actually used
};

/// One dynamic-programming update at an interior node of `field`, returning
/// the refreshed value and the maximizing frame/pattern. `cfg` must be
/// resolved. Monotone: nondecreasing in every sampled neighbor value.
std::pair<double, PolicyEntry> node_update(int32_t node, const ValueField& field,
                                           const ProblemParams& params, const SolveConfig& cfg);

/// Jacobi value iteration from the zero field. Throws ConvergenceError when
/// max_iter is exhausted with residual above 100 * tol_iter, or if any sweep
/// breaches the enclosing-ball upper bound by more than 10 * delta.
SolveResult solve(const Domain& dom, const ProblemParams& params, SolveConfig cfg);

/// (R^2 - |x - c|^2)^+ / (n - k) for the enclosing ball (c, R): an a-priori
/// upper bound for the value function on any domain inside that ball.
double ball_envelope(const Domain& dom, const ProblemParams& params, const Vec& x);

}  // namespace relarb
