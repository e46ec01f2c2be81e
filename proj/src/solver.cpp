#include "relarb/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace relarb {

namespace {

constexpr int kMaxN = 4;
constexpr int kMaxDirs = 4;

double value_at(const Vec& buf, int32_t lin) {
  const double v = buf[lin];
  return std::isnan(v) ? 0.0 : v;
}

// Central differences, one-sided at the grid faces. Off-domain neighbors
// read as zero, matching the sampling convention.
void node_gradient(const Grid& grid, const Vec& cur, int32_t lin, const int* idx, double* g) {
  const int n = grid.n();
  for (int d = 0; d < n; ++d) {
    const int32_t s = grid.strides[d];
    const bool has_lo = idx[d] > 0;
    const bool has_hi = idx[d] + 1 < grid.dims[d];
    if (has_lo && has_hi)
      g[d] = (value_at(cur, lin + s) - value_at(cur, lin - s)) / (2.0 * grid.delta);
    else if (has_hi)
      g[d] = (value_at(cur, lin + s) - value_at(cur, lin)) / grid.delta;
    else
      g[d] = (value_at(cur, lin) - value_at(cur, lin - s)) / grid.delta;
  }
}

uint64_t frame_salt(int32_t lin, int fi, bool tangential) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(lin)) << 6) + static_cast<uint64_t>(fi) * 2 +
         (tangential ? 1 : 0);
}

// Directions (as rows of out) of candidate frame `fi`: the deterministic
// base frame for fi = 0, a seeded rotation of it otherwise. Rotations of a
// one-dimensional subspace only flip signs, which the trinomial samples are
// symmetric under, so callers skip fi >= 1 in that case.
void make_frame(int n, uint64_t seed, int32_t lin, bool tangential, int fi, const double* g,
                double out[][kMaxN]) {
  const int f = tangential ? n - 1 : n;
  double base[kMaxN * kMaxDirs];
  if (tangential) detail::householder_complement(g, n, base);

  if (fi == 0) {
    for (int c = 0; c < f; ++c)
      for (int i = 0; i < n; ++i)
        out[c][i] = tangential ? base[static_cast<size_t>(i) * f + c] : (i == c ? 1.0 : 0.0);
    return;
  }

  double q[kMaxDirs * kMaxDirs];
  detail::fill_gaussian(q, f, mix_seed(seed, frame_salt(lin, fi, tangential)));
  detail::orthonormalize_square(q, f);
  for (int c = 0; c < f; ++c)
    for (int i = 0; i < n; ++i) {
      if (tangential) {
        double s = 0.0;
        for (int m = 0; m < f; ++m) s += base[static_cast<size_t>(i) * f + m] * q[m * f + c];
        out[c][i] = s;
      } else {
        out[c][i] = q[static_cast<size_t>(i) * f + c];
      }
    }
}

struct Pattern {
  double value = -std::numeric_limits<double>::infinity();
  int n_high = 0;      // directions carrying L
  int n_one = 0;       // directions carrying 1
  double denom = 0.0;  // total weight
  std::array<int, kMaxDirs> order{};
};

// Sorted-prefix enumeration of {0,1,L} weight patterns with n_mand
// mandatory >=1 slots, maximizing (sum lambda_i b_i + rho^2) / sum lambda_i.
Pattern best_pattern(const double* b, int f, int n_mand, double L, double rho2) {
  Pattern best;
  std::array<int, kMaxDirs> order{};
  for (int i = 0; i < f; ++i) order[i] = i;
  for (int i = 1; i < f; ++i) {  // stable insertion sort, descending b
    const int key = order[i];
    int j = i - 1;
    while (j >= 0 && b[order[j]] < b[key]) {
      order[j + 1] = order[j];
      --j;
    }
    order[j + 1] = key;
  }
  double prefix[kMaxDirs + 1] = {0.0};
  for (int i = 0; i < f; ++i) prefix[i + 1] = prefix[i] + b[order[i]];

  for (int j = 0; j <= f; ++j) {
    const int n1 = std::max(0, n_mand - j);
    const double den = L * j + n1;
    const double num = L * prefix[j] + (prefix[j + n1] - prefix[j]) + rho2;
    const double val = num / den;
    if (val > best.value) {
      best.value = val;
      best.n_high = j;
      best.n_one = n1;
      best.denom = den;
      best.order = order;
    }
  }
  return best;
}

struct SweepEngine {
  const Grid& grid;
  const ProblemParams& params;
  const SolveConfig& cfg;
  int n;
  int n_mand;
  double rho2;
  int tang_dirs, tang_frames, full_dirs, full_frames;
  kernels::GridDesc desc;

  std::vector<double> xs[kMaxN];
  Vec samples;
  std::vector<int64_t> offsets;
  std::vector<uint8_t> tang;

  SweepEngine(const Grid& g, const ProblemParams& p, const SolveConfig& c)
      : grid(g), params(p), cfg(c), n(g.n()), n_mand(p.n - p.k), rho2(c.rho * c.rho) {
    tang_dirs = n - 1;
    tang_frames = 1 + (tang_dirs >= 2 ? cfg.n_random_frames : 0);
    full_dirs = n;
    full_frames = 1 + cfg.n_random_frames;
    desc = g.desc();
    const size_t cap = g.interior.size() * static_cast<size_t>(full_frames * full_dirs * 2);
    for (int d = 0; d < n; ++d) xs[d].reserve(cap);
    offsets.resize(g.interior.size());
    tang.resize(g.interior.size());
  }

  int frames_of(bool tangential) const { return tangential ? tang_frames : full_frames; }
  int dirs_of(bool tangential) const { return tangential ? tang_dirs : full_dirs; }

  // Phase A: gradients, frame generation, query emission.
  void emit_queries(const Vec& cur) {
    for (int d = 0; d < n; ++d) xs[d].clear();
    Vec x(n);
    int idx[kMaxN];
    double g[kMaxN];
    double dirs[kMaxDirs][kMaxN];
    for (size_t ni = 0; ni < grid.interior.size(); ++ni) {
      const int32_t lin = grid.interior[ni];
      grid.decode(lin, idx);
      for (int d = 0; d < n; ++d) x[d] = grid.origin[d] + idx[d] * grid.delta;
      node_gradient(grid, cur, lin, idx, g);
      double gn = 0.0;
      for (int d = 0; d < n; ++d) gn += g[d] * g[d];
      const bool tangential = std::sqrt(gn) > cfg.tol_grad;

      tang[ni] = tangential ? 1 : 0;
      offsets[ni] = static_cast<int64_t>(xs[0].size());
      const int nf = frames_of(tangential);
      const int f = dirs_of(tangential);
      for (int fi = 0; fi < nf; ++fi) {
        make_frame(n, cfg.seed, lin, tangential, fi, g, dirs);
        for (int c = 0; c < f; ++c) {
          for (int d = 0; d < n; ++d) xs[d].push_back(x[d] + cfg.rho * dirs[c][d]);
          for (int d = 0; d < n; ++d) xs[d].push_back(x[d] - cfg.rho * dirs[c][d]);
        }
      }
    }
    samples.resize(xs[0].size());
  }

  // Phase B: batched interpolation of every emitted query.
  void sample_all(const Vec& cur) {
    const double* ptrs[kMaxN];
    for (int d = 0; d < n; ++d) ptrs[d] = xs[d].data();
    kernels::interp_batch(desc, cur.data(), ptrs, samples.data(), samples.size());
  }

  // Phase C core for one node: trinomial values and the pattern maximum.
  Pattern node_best(size_t ni, int* best_frame) const {
    const bool tangential = tang[ni] != 0;
    const int nf = frames_of(tangential);
    const int f = dirs_of(tangential);
    Pattern best;
    int64_t o = offsets[ni];
    for (int fi = 0; fi < nf; ++fi) {
      double b[kMaxDirs];
      for (int c = 0; c < f; ++c, o += 2) b[c] = 0.5 * (samples[o] + samples[o + 1]);
      const Pattern pat = best_pattern(b, f, n_mand, params.L, rho2);
      if (pat.value > best.value) {
        best = pat;
        *best_frame = fi;
      }
    }
    return best;
  }
};

double envelope_from_ball(const Vec& center, double radius, int n_mand, const Vec& x) {
  double d2 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double di = x[i] - center[i];
    d2 += di * di;
  }
  return std::max(radius * radius - d2, 0.0) / n_mand;
}

}  // namespace

SolveConfig resolve_config(SolveConfig cfg, const Domain& dom, const ProblemParams& params) {
  if (!(cfg.delta > 0.0)) throw ValidationError("solve: delta must be positive");
  if (cfg.n_random_frames < 0) throw ValidationError("solve: n_random_frames must be >= 0");
  Vec center;
  double radius = 0.0;
  enclosing_ball(dom, center, radius);
  const double v_bound = radius * radius / (params.n - params.k);

  if (cfg.rho == 0.0) cfg.rho = std::max(cfg.delta, 0.5 * std::sqrt(cfg.delta * 2.0 * radius));
  if (cfg.rho < cfg.delta) throw ValidationError("solve: stencil radius rho must be >= delta");
  if (cfg.tol_iter == 0.0) cfg.tol_iter = 1e-7 * v_bound;
  if (cfg.tol_iter <= 0.0) throw ValidationError("solve: tol_iter must be positive");
  if (cfg.max_iter == 0) cfg.max_iter = static_cast<int64_t>(std::ceil(10.0 * v_bound / (cfg.delta * cfg.delta)));
  if (cfg.max_iter < 1) throw ValidationError("solve: max_iter must be >= 1");
  if (cfg.tol_grad == 0.0) cfg.tol_grad = 10.0 * cfg.delta;
  return cfg;
}

SymMatrix ControlPolicy::control_at(size_t i) const {
  const PolicyEntry& e = entries[i];
  return SymMatrix::from_spectral(e.frame, e.lambdas);
}

std::pair<double, PolicyEntry> node_update(int32_t node, const ValueField& field,
                                           const ProblemParams& params, const SolveConfig& cfg) {
  if (!field.grid.inside[node]) throw ValidationError("node_update: node is not interior");
  if (!(cfg.rho > 0.0)) throw ValidationError("node_update: config must be resolved");

  const Grid& grid = field.grid;
  const int n = grid.n();
  const int n_mand = params.n - params.k;
  int idx[kMaxN];
  grid.decode(node, idx);
  const Vec x = grid.coords(node);
  double g[kMaxN];
  node_gradient(grid, field.sampling, node, idx, g);
  double gn = 0.0;
  for (int d = 0; d < n; ++d) gn += g[d] * g[d];
  const bool tangential = std::sqrt(gn) > cfg.tol_grad;

  const int f = tangential ? n - 1 : n;
  const int nf = 1 + (f >= 2 ? cfg.n_random_frames : 0);
  double dirs[kMaxDirs][kMaxN];
  std::vector<double> qs[kMaxN];
  std::vector<Mat> frames;
  for (int fi = 0; fi < nf; ++fi) {
    make_frame(n, cfg.seed, node, tangential, fi, g, dirs);
    Mat fr(n, f);
    for (int c = 0; c < f; ++c) {
      for (int d = 0; d < n; ++d) {
        fr(d, c) = dirs[c][d];
        qs[d].push_back(x[d] + cfg.rho * dirs[c][d]);
      }
      for (int d = 0; d < n; ++d) qs[d].push_back(x[d] - cfg.rho * dirs[c][d]);
    }
    frames.push_back(std::move(fr));
  }
  Vec out(qs[0].size());
  const double* ptrs[kMaxN];
  for (int d = 0; d < n; ++d) ptrs[d] = qs[d].data();
  kernels::interp_batch(grid.desc(), field.sampling.data(), ptrs, out.data(), out.size());

  Pattern best;
  int best_frame = 0;
  int64_t o = 0;
  for (int fi = 0; fi < nf; ++fi) {
    double b[kMaxDirs];
    for (int c = 0; c < f; ++c, o += 2) b[c] = 0.5 * (out[o] + out[o + 1]);
    const Pattern pat = best_pattern(b, f, n_mand, params.L, cfg.rho * cfg.rho);
    if (pat.value > best.value) {
      best = pat;
      best_frame = fi;
    }
  }

  PolicyEntry entry;
  entry.gradient.assign(g, g + n);
  entry.frame = frames[best_frame];
  entry.lambdas.assign(f, 0.0);
  for (int r = 0; r < best.n_high; ++r) entry.lambdas[best.order[r]] = params.L;
  for (int r = best.n_high; r < best.n_high + best.n_one; ++r) entry.lambdas[best.order[r]] = 1.0;
  return {best.value, std::move(entry)};
}

double ball_envelope(const Domain& dom, const ProblemParams& params, const Vec& x) {
  Vec center;
  double radius = 0.0;
  enclosing_ball(dom, center, radius);
  return envelope_from_ball(center, radius, params.n - params.k, x);
}

SolveResult solve(const Domain& dom, const ProblemParams& params, SolveConfig cfg0) {
  const SolveConfig cfg = resolve_config(cfg0, dom, params);
  Grid grid = build_grid(dom, cfg.delta);
  if (grid.interior.empty()) throw ValidationError("solve: grid has no interior nodes");
  if (grid.n() != params.n) throw ValidationError("solve: domain dimension does not match params.n");

  Vec center;
  double radius = 0.0;
  enclosing_ball(dom, center, radius);

  const size_t n_int = grid.interior.size();
  Vec bound(n_int);
  for (size_t i = 0; i < n_int; ++i)
    bound[i] = envelope_from_ball(center, radius, params.n - params.k, grid.coords(grid.interior[i])) +
               10.0 * cfg.delta;

  // Double-buffered sampling fields: NaN off the domain, values inside.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Vec cur(grid.node_count, nan), next(grid.node_count, nan);
  for (int32_t lin : grid.interior) cur[lin] = next[lin] = 0.0;

  SweepEngine engine(grid, params, cfg);
  Vec history;
  double min_gap = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  int64_t sweeps = 0;

  // Policy-iteration caches (flat, aligned with eval query order).
  std::vector<double> eval_xs[kMaxN];
  Vec eval_w, eval_const, eval_samples;
  std::vector<int64_t> eval_off;

  const auto bound_check = [&](size_t ni, double val) {
    if (val > bound[ni]) {
      std::ostringstream os;
      os << "solve: enclosing-ball bound violated at node " << grid.interior[ni] << " (" << val
         << " > " << bound[ni] << ")";
      throw ConvergenceError(os.str(), val, history);
    }
  };

  const auto improvement_sweep = [&](bool cache_policy) {
    engine.emit_queries(cur);
    engine.sample_all(cur);
    if (cache_policy) {
      for (int d = 0; d < grid.n(); ++d) eval_xs[d].clear();
      eval_w.clear();
      eval_const.resize(n_int);
      eval_off.resize(n_int);
    }
    double res = 0.0, gap = 0.0;
    for (size_t ni = 0; ni < n_int; ++ni) {
      const int32_t lin = grid.interior[ni];
      int best_frame = 0;
      const Pattern best = engine.node_best(ni, &best_frame);
      // Monotone envelope: the gradient-regime switch is bistable at
      // boundary-adjacent nodes and plain Jacobi limit-cycles there; from the
      // zero start the nondecreasing envelope settles instead.
      const double value = std::max(best.value, cur[lin]);
      bound_check(ni, value);
      const double delta_v = value - cur[lin];
      res = std::max(res, std::abs(delta_v));
      gap = std::min(gap, delta_v);
      next[lin] = value;

      if (cache_policy) {
        const int f = engine.dirs_of(engine.tang[ni] != 0);
        double lam[kMaxDirs] = {0.0, 0.0, 0.0, 0.0};
        for (int r = 0; r < best.n_high; ++r) lam[best.order[r]] = params.L;
        for (int r = best.n_high; r < best.n_high + best.n_one; ++r) lam[best.order[r]] = 1.0;
        eval_off[ni] = static_cast<int64_t>(eval_xs[0].size());
        eval_const[ni] = engine.rho2 / best.denom;
        const int64_t src = engine.offsets[ni] + static_cast<int64_t>(best_frame) * f * 2;
        for (int c = 0; c < f; ++c)
          for (int pm = 0; pm < 2; ++pm) {
            for (int d = 0; d < grid.n(); ++d) eval_xs[d].push_back(engine.xs[d][src + 2 * c + pm]);
            eval_w.push_back(lam[c] / (2.0 * best.denom));
          }
      }
    }
    min_gap = std::min(min_gap, gap);
    std::swap(cur, next);
    history.push_back(res);
    ++sweeps;
    return res;
  };

  if (!cfg.policy_iteration) {
    while (sweeps < cfg.max_iter) {
      residual = improvement_sweep(false);
      if (residual < cfg.tol_iter) break;
    }
  } else {
    while (sweeps < cfg.max_iter) {
      residual = improvement_sweep(true);
      if (residual < cfg.tol_iter) break;

      // Frozen-policy evaluation sweeps: same queries, fixed weights.
      const double inner_tol = std::max(cfg.tol_iter, 0.05 * residual);
      eval_samples.resize(eval_xs[0].size());
      for (int inner = 0; inner < 50 && sweeps < cfg.max_iter; ++inner) {
        const double* ptrs[kMaxN];
        for (int d = 0; d < grid.n(); ++d) ptrs[d] = eval_xs[d].data();
        kernels::interp_batch(engine.desc, cur.data(), ptrs, eval_samples.data(),
                              eval_samples.size());
        double res = 0.0, gap = 0.0;
        for (size_t ni = 0; ni < n_int; ++ni) {
          const int32_t lin = grid.interior[ni];
          const int f = engine.dirs_of(engine.tang[ni] != 0);
          double val = eval_const[ni];
          const int64_t o = eval_off[ni];
          for (int s = 0; s < 2 * f; ++s) val += eval_w[o + s] * eval_samples[o + s];
          val = std::max(val, cur[lin]);
          bound_check(ni, val);
          const double delta_v = val - cur[lin];
          res = std::max(res, std::abs(delta_v));
          gap = std::min(gap, delta_v);
          next[lin] = val;
        }
        min_gap = std::min(min_gap, gap);
        std::swap(cur, next);
        history.push_back(res);
        ++sweeps;
        if (res < inner_tol) break;
      }
    }
  }

  if (residual >= cfg.tol_iter && residual > 100.0 * cfg.tol_iter)
    throw ConvergenceError("solve: max_iter reached with residual above 100*tol_iter", residual,
                           history);

  // Extraction pass: refresh per-node policies at the converged field.
  ValueField field(grid);
  for (int32_t lin : grid.interior) field.set_node_value(lin, cur[lin]);
  field.iterations = sweeps;
  field.residual = residual;

  ControlPolicy policy;
  policy.nodes.assign(grid.interior.begin(), grid.interior.end());
  policy.entries.reserve(n_int);
  for (size_t ni = 0; ni < n_int; ++ni)
    policy.entries.push_back(node_update(grid.interior[ni], field, params, cfg).second);

  SolveResult out;
  out.field = std::move(field);
  out.policy = std::move(policy);
  out.residual_history = std::move(history);
  out.min_update_gap = min_gap;
  out.config = cfg;
  return out;
}

}  // namespace relarb
