#include "relarb/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace relarb {

namespace {

constexpr double kAdmissTol = 1e-6;  // on-the-fly checks run tolerance-relaxed

struct StepContext {
  const Domain& dom;
  const ProblemParams& params;
  const ControlFn& control;
  const PathConfig& cfg;
  int n;
  double sqrt_dt;
};

void check_control(const Spectrum& spec, const ProblemParams& params, const Vec& x) {
  const int n = params.n;
  const bool ok = spec.lambda_min() >= -kAdmissTol &&
                  spec.eigenvalues[n - params.k - 1] >= 1.0 - kAdmissTol &&
                  spec.lambda_max() <= params.L + kAdmissTol;
  if (!ok) {
    std::ostringstream os;
    os << "simulate_exit: control is not admissible at state (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << x[i];
    os << ")";
    throw ValidationError(os.str());
  }
}

// One Euler-Maruyama increment; the spectrum doubles as the matrix root.
void increment(const StepContext& ctx, const Spectrum& spec, Rng& rng, Vec& dx) {
  const int n = ctx.n;
  dx.assign(n, 0.0);
  if (ctx.cfg.increment_scheme == PathConfig::Increments::Gaussian) {
    for (int i = 0; i < n; ++i) {
      const double lam = std::max(spec.eigenvalues[i], 0.0);
      if (lam == 0.0) continue;
      const double amp = std::sqrt(lam) * ctx.sqrt_dt * rng.normal();
      for (int d = 0; d < n; ++d) dx[d] += amp * spec.frame(d, i);
    }
  } else {
    // Signed scaled eigen-direction: mean 0, covariance dt * a.
    const int i = rng.uniform_int(n);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double lam = std::max(spec.eigenvalues[i], 0.0);
    const double amp = sign * std::sqrt(static_cast<double>(n) * lam) * ctx.sqrt_dt;
    for (int d = 0; d < n; ++d) dx[d] = amp * spec.frame(d, i);
  }
}

struct PathOutcome {
  double exit_time = 0.0;
  bool censored = false;
  double radial_residual = 0.0;
};

PathOutcome run_path(const StepContext& ctx, const Vec& x0, int64_t path_index,
                     PathRecord* record) {
  Rng rng(mix_seed(ctx.cfg.seed, static_cast<uint64_t>(path_index)));
  const int n = ctx.n;
  const double x0_sq = dot(x0, x0);
  const int n_mand = ctx.params.n - ctx.params.k;

  Vec x = x0, dx(n);
  double t = 0.0;
  double slack = boundary_slack(ctx.dom, x);
  PathOutcome out;
  if (record) {
    record->times.push_back(0.0);
    record->states.push_back(x);
  }

  while (t < ctx.cfg.t_max) {
    const SymMatrix a = ctx.control(x);
    const Spectrum spec = sym_eigen(a);
    check_control(spec, ctx.params, x);
    increment(ctx, spec, rng, dx);

    for (int d = 0; d < n; ++d) x[d] += dx[d];
    t += ctx.cfg.dt;

    if (record) {
      record->times.push_back(t);
      record->states.push_back(x);
    }
    if (ctx.cfg.record_radial_residuals) {
      const double dev = std::abs(dot(x, x) - x0_sq - n_mand * t);
      out.radial_residual = std::max(out.radial_residual, dev);
    }

    const double new_slack = boundary_slack(ctx.dom, x);
    if (new_slack < 0.0) {
      // Linear-in-time crossing of the slack over the exit segment.
      const double prev = std::max(slack, 0.0);
      const double theta = prev / (prev - new_slack);
      out.exit_time = (t - ctx.cfg.dt) + theta * ctx.cfg.dt;
      return out;
    }
    slack = new_slack;
  }
  out.censored = true;
  return out;
}

double quantile(const Vec& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

SymMatrix tangential_control(const Vec& y, int n_prime) {
  const int n = static_cast<int>(y.size());
  if (n_prime < 1 || n_prime > n) throw ValidationError("tangential_control: bad subspace dim");
  SymMatrix a = SymMatrix::zero(n);
  double block_sq = 0.0;
  for (int i = 0; i < n_prime; ++i) block_sq += y[i] * y[i];
  for (int i = 0; i < n_prime; ++i) a(i, i) = 1.0;
  if (block_sq > 0.0) {
    for (int i = 0; i < n_prime; ++i)
      for (int j = 0; j < n_prime; ++j) a(i, j) -= y[i] * y[j] / block_sq;
  }
  return a;
}

ControlFn make_tangential_control(int n_prime) {
  return [n_prime](const Vec& y) { return tangential_control(y, n_prime); };
}

Mat skew_generator(const Vec& grad, const Vec& q, double lambda) {
  const double g2 = dot(grad, grad);
  if (g2 == 0.0) throw ValidationError("skew_generator: zero gradient");
  const int n = static_cast<int>(grad.size());
  const double c = std::sqrt(lambda) / g2;
  Mat s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = c * (q[i] * grad[j] - grad[i] * q[j]);
  return s;
}

Mat build_skew_sigma(const Vec& grad, const Mat& frame, const Vec& lambdas) {
  if (dot(grad, grad) == 0.0) throw ValidationError("build_skew_sigma: zero gradient");
  const int n = static_cast<int>(grad.size());
  Mat sigma(n, frame.cols);
  for (int c = 0; c < frame.cols; ++c) {
    const Mat s = skew_generator(grad, frame.col(c), lambdas[c]);
    const Vec col = mat_vec(s, grad);
    for (int i = 0; i < n; ++i) sigma(i, c) = col[i];
  }
  return sigma;
}

ExitStats simulate_exit(const Domain& dom, const ProblemParams& params, const ControlFn& control,
                        const Vec& x0, const PathConfig& cfg) {
  if (!(cfg.dt > 0.0) || cfg.dt > cfg.t_max) throw ValidationError("simulate_exit: need 0 < dt <= t_max");
  if (cfg.n_paths < 1) throw ValidationError("simulate_exit: n_paths must be >= 1");
  if (!contains(dom, x0)) throw ValidationError("simulate_exit: start point lies outside the domain");

  StepContext ctx{dom, params, control, cfg, dom.dim(), std::sqrt(cfg.dt)};
  ExitStats stats;
  stats.n_paths = cfg.n_paths;
  for (int64_t p = 0; p < cfg.n_paths; ++p) {
    const PathOutcome out = run_path(ctx, x0, p, nullptr);
    if (out.censored)
      ++stats.n_censored;
    else
      stats.exit_times.push_back(out.exit_time);
    if (cfg.record_radial_residuals) stats.radial_residuals.push_back(out.radial_residual);
  }

  std::sort(stats.exit_times.begin(), stats.exit_times.end());
  stats.all_censored = stats.exit_times.empty();
  if (!stats.all_censored) {
    stats.min = stats.exit_times.front();
    double sum = 0.0;
    for (double t : stats.exit_times) sum += t;
    stats.mean = sum / static_cast<double>(stats.exit_times.size());
    double var = 0.0;
    for (double t : stats.exit_times) var += (t - stats.mean) * (t - stats.mean);
    stats.std = std::sqrt(var / static_cast<double>(stats.exit_times.size()));
    stats.q05 = quantile(stats.exit_times, 0.05);
    stats.q50 = quantile(stats.exit_times, 0.50);
    stats.q95 = quantile(stats.exit_times, 0.95);
  }
  return stats;
}

PathRecord simulate_path(const Domain& dom, const ProblemParams& params, const ControlFn& control,
                         const Vec& x0, const PathConfig& cfg, int64_t path_index) {
  if (!contains(dom, x0)) throw ValidationError("simulate_path: start point lies outside the domain");
  StepContext ctx{dom, params, control, cfg, dom.dim(), std::sqrt(cfg.dt)};
  PathRecord record;
  run_path(ctx, x0, path_index, &record);
  return record;
}

double radial_residual(const PathRecord& path, int n_minus_k) {
  if (path.times.empty()) return 0.0;
  const double x0_sq = dot(path.states.front(), path.states.front());
  double worst = 0.0;
  for (size_t i = 0; i < path.times.size(); ++i) {
    const double dev =
        std::abs(dot(path.states[i], path.states[i]) - x0_sq - n_minus_k * path.times[i]);
    worst = std::max(worst, dev);
  }
  return worst;
}

std::string exit_stats_json(const ExitStats& stats, const ProblemParams& params,
                            const PathConfig& cfg) {
  nlohmann::json j;
  j["min"] = stats.min;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  j["q05"] = stats.q05;
  j["q50"] = stats.q50;
  j["q95"] = stats.q95;
  j["n_censored"] = stats.n_censored;
  j["semantics"] = "sample-min upper-estimates ess-inf";
  j["all_censored"] = stats.all_censored;
  j["params"] = {{"n", params.n}, {"k", params.k}, {"L", params.L}};
  j["config"] = {{"dt", cfg.dt},
                 {"n_paths", cfg.n_paths},
                 {"t_max", cfg.t_max},
                 {"increment_scheme",
                  cfg.increment_scheme == PathConfig::Increments::Gaussian ? "gaussian"
                                                                           : "rademacher-branch"}};
  j["seed"] = cfg.seed;
  j["version"] = kVersion;
  return j.dump(2);
}

}  // namespace relarb
