// relarb: eigenvalue-constrained exit-time toolkit.
//
// Subcommands: eval-f, solve, simulate, horizon, check-vol, selftest.
// Exit codes: 0 success, 1 selftest failure, 2 validation error,
// 3 convergence error, 4 resource error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relarb/nonlinearity.hpp"
#include "relarb/spt.hpp"

using namespace relarb;

namespace {

Vec parse_vector(const std::string& text) {
  Vec out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ',')) {
    try {
      out.push_back(std::stod(cur));
    } catch (const std::exception&) {
      throw ValidationError("could not parse vector entry '" + cur + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty vector argument");
  return out;
}

SymMatrix parse_matrix(const std::string& text) {
  std::vector<Vec> rows;
  std::string row;
  std::istringstream is(text);
  while (std::getline(is, row, ';')) rows.push_back(parse_vector(row));
  const int n = static_cast<int>(rows.size());
  Vec entries;
  for (const Vec& r : rows) {
    if (static_cast<int>(r.size()) != n) throw ValidationError("matrix argument is not square");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return SymMatrix(n, entries);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

nlohmann::json matrix_json(const SymMatrix& m) {
  std::vector<Vec> rows;
  for (int i = 0; i < m.dim; ++i) {
    Vec r(m.dim);
    for (int j = 0; j < m.dim; ++j) r[j] = m(i, j);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct CommonFlags {
  int n = 0;
  int k = 1;
  double L = 1.0;
  uint64_t seed = 0;
};

int cmd_eval_f(const CommonFlags& c, const std::string& p_text, const std::string& m_text) {
  const Vec p = parse_vector(p_text);
  const SymMatrix m = parse_matrix(m_text);
  const int n = c.n > 0 ? c.n : m.dim;
  const ProblemParams params(n, c.k, c.L);
  if (m.dim != n || static_cast<int>(p.size()) != n)
    throw ValidationError("eval-f: --p/--M dimensions must match --n");

  const FValue f = f_closed(p, m, params);
  nlohmann::json j;
  j["F"] = f.value;
  j["F_lower"] = f_lower(p, m, params);
  j["F_upper"] = f_upper(p, m, params);
  j["optimal_a"] = matrix_json(f.achieved_by->a);
  j["params"] = {{"n", params.n}, {"k", params.k}, {"L", params.L}};
  j["seed"] = c.seed;
  j["version"] = kVersion;
  std::cout << j.dump(2) << "\n";
  return 0;
}

nlohmann::json config_json(const SolveConfig& cfg) {
  return {{"delta", cfg.delta},         {"rho", cfg.rho},
          {"n_random_frames", cfg.n_random_frames}, {"tol_iter", cfg.tol_iter},
          {"max_iter", cfg.max_iter},   {"tol_grad", cfg.tol_grad},
          {"seed", cfg.seed},           {"policy_iteration", cfg.policy_iteration}};
}

int cmd_solve(const CommonFlags& c, const std::string& domain_path, SolveConfig cfg,
              const std::string& out_base) {
  const Domain dom = domain_from_json(read_file(domain_path));
  const int n = c.n > 0 ? c.n : dom.dim();
  if (n != dom.dim()) throw ValidationError("solve: --n does not match the domain dimension");
  const ProblemParams params(n, c.k, c.L);
  cfg.seed = c.seed;

  const SolveResult res = solve(dom, params, cfg);
  write_file(out_base + ".csv", value_field_csv(res.field));

  nlohmann::json meta;
  meta["params"] = {{"n", params.n}, {"k", params.k}, {"L", params.L}};
  meta["config"] = config_json(res.config);
  meta["residual"] = res.field.residual;
  meta["iterations"] = res.field.iterations;
  meta["min_update_gap"] = res.min_update_gap;
  meta["grid"] = {{"nodes", res.field.grid.node_count},
                  {"interior", static_cast<int64_t>(res.field.grid.interior.size())},
                  {"dims", res.field.grid.dims}};
  meta["seed"] = c.seed;
  meta["version"] = kVersion;
  write_file(out_base + ".json", meta.dump(2));

  std::cout << "solve: " << res.field.grid.interior.size() << " interior nodes, "
            << res.field.iterations << " sweeps, residual " << res.field.residual << "\n"
            << "artifacts: " << out_base << ".csv, " << out_base << ".json\n";
  return 0;
}

int cmd_simulate(const CommonFlags& c, const std::string& domain_path, const std::string& x0_text,
                 PathConfig pc, const std::string& out_path) {
  const Domain dom = domain_from_json(read_file(domain_path));
  const int n = c.n > 0 ? c.n : dom.dim();
  if (n != dom.dim()) throw ValidationError("simulate: --n does not match the domain dimension");
  const ProblemParams params(n, c.k, c.L);
  const Vec x0 = parse_vector(x0_text);
  if (static_cast<int>(x0.size()) != n) throw ValidationError("simulate: --p has wrong dimension");
  pc.seed = c.seed;
  if (pc.t_max <= 0.0) pc.t_max = std::max(4.0 * ball_envelope(dom, params, x0), 1.0);

  const ExitStats stats =
      simulate_exit(dom, params, make_tangential_control(params.n - params.k + 1), x0, pc);
  const std::string json = exit_stats_json(stats, params, pc);
  if (!out_path.empty()) write_file(out_path, json);
  std::cout << json << "\n";
  if (stats.all_censored) std::cerr << "warning: all paths censored at t_max\n";
  return 0;
}

int cmd_horizon(const CommonFlags& c, const std::string& weights_path, HorizonConfig cfg,
                const std::string& out_path) {
  const WeightSeries series = parse_weights_csv(read_file(weights_path));
  const ProblemParams params(series.d - 1, c.k, c.L);
  cfg.seed = c.seed;
  const HorizonReport report = horizon(series.weights.front(), params, cfg);
  const std::string json = horizon_report_json(report);
  if (!out_path.empty()) write_file(out_path, json);
  std::cout << json << "\n";
  return 0;
}

int cmd_check_vol(const CommonFlags& c, const std::string& cov_path, const std::string& out_path) {
  const CovSeries series = parse_cov_csv(read_file(cov_path));
  const ProblemParams params(series.d - 1, c.k, c.L);
  const SimplexMap map = simplex_isometry(series.d);
  const VolatilityReport report = check_sufficient_volatility(series, map, params);
  const std::string json = volatility_report_json(report, params);
  if (!out_path.empty()) write_file(out_path, json);
  std::cout << json << "\n";
  return 0;
}

bool report(const char* name, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << " " << name << "\n";
  return ok;
}

int cmd_selftest(uint64_t seed) {
  bool all = true;

  // Closed form against the enumeration oracle.
  {
    Rng rng(mix_seed(seed, 101));
    bool ok = true;
    for (int n : {2, 3, 4}) {
      for (int trial = 0; trial < 500 && ok; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_u64() % (n - 1));
        const ProblemParams params(n, k, 1.0 + rng.uniform(0.0, 4.0));
        Vec entries(static_cast<size_t>(n) * n);
        for (double& v : entries) v = rng.uniform(-5.0, 5.0);
        const SymMatrix m(n, entries);
        Vec p(n, 0.0);
        if (trial % 10 != 0)
          for (double& v : p) v = rng.uniform(-5.0, 5.0);
        const double closed = f_closed(p, m, params).value;
        const double oracle = f_oracle(p, m, params, 8, rng.next_u64());
        ok = oracle >= closed - 1e-8 && std::abs(oracle - closed) <= 1e-6 * (1.0 + std::abs(closed));
      }
    }
    all &= report("operator oracle (n=2,3,4 x 500 draws)", ok);
  }

  // Solver against the exact radial solution on the unit ball.
  {
    const ProblemParams params(2, 1, 1.0);
    SolveConfig cfg;
    cfg.delta = 0.05;
    cfg.seed = seed;
    const SolveResult res = solve(make_ball({0.0, 0.0}, 1.0), params, cfg);
    const double center = sample_value(res.field, {0.0, 0.0});
    all &= report("ball oracle (n=2, delta=0.05, center within 15%)", std::abs(center - 1.0) <= 0.15);
  }

  std::cout << (all ? "selftest passed" : "selftest FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relarb: eigenvalue-constrained exit-time toolkit"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string p_text, m_text, domain_path, weights_path, cov_path, out_path;
  SolveConfig solve_cfg;
  PathConfig path_cfg;
  HorizonConfig horizon_cfg;
  path_cfg.dt = 1e-3;
  path_cfg.n_paths = 200;

  const auto add_common = [&](CLI::App* cmd, bool with_n = true) {
    if (with_n) cmd->add_option("--n", common.n, "ambient dimension (default: inferred)");
    cmd->add_option("--k", common.k, "rank index k in {1,...,n-1}");
    cmd->add_option("--L", common.L, "eigenvalue cap L >= 1");
    cmd->add_option("--seed", common.seed, "random seed");
  };

  auto* evalf = app.add_subcommand("eval-f", "evaluate F, its envelopes, and the optimal control");
  add_common(evalf);
  evalf->add_option("--p", p_text, "gradient vector, comma-separated")->required();
  evalf->add_option("--M", m_text, "symmetric matrix, ';'-separated rows")->required();

  auto* solve_cmd = app.add_subcommand("solve", "grid solve of F(grad v, Hess v) = 1, v = 0 off K");
  add_common(solve_cmd);
  solve_cmd->add_option("--domain", domain_path, "domain JSON file")->required();
  solve_cmd->add_option("--delta", solve_cfg.delta, "grid spacing")->required();
  solve_cmd->add_option("--rho", solve_cfg.rho, "stencil radius (default 0.5*sqrt(delta*diam))");
  solve_cmd->add_option("--frames", solve_cfg.n_random_frames, "random frames per node");
  solve_cmd->add_option("--tol", solve_cfg.tol_iter, "sweep convergence tolerance");
  solve_cmd->add_option("--max-iter", solve_cfg.max_iter, "sweep cap");
  solve_cmd->add_flag("--policy-iteration", solve_cfg.policy_iteration,
                      "frozen-policy evaluation sweeps between improvements");
  solve_cmd->add_option("--out", out_path, "output basename")->default_val("valuefield");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo exit times under the tangential control");
  add_common(sim);
  sim->add_option("--domain", domain_path, "domain JSON file")->required();
  sim->add_option("--p", p_text, "start point, comma-separated")->required();
  sim->add_option("--dt", path_cfg.dt, "Euler step");
  sim->add_option("--paths", path_cfg.n_paths, "number of paths");
  sim->add_option("--tmax", path_cfg.t_max, "censoring time (default: 4x ball bound)");
  sim->add_option("--out", out_path, "output JSON path");

  auto* hor = app.add_subcommand("horizon", "report T* from market weights");
  add_common(hor, false);
  hor->add_option("--weights", weights_path, "weights CSV (header t,w1,...,wd)")->required();
  hor->add_option("--delta", horizon_cfg.delta, "grid spacing");
  hor->add_option("--dt", horizon_cfg.sde_dt, "Euler step for the SDE estimate");
  hor->add_option("--paths", horizon_cfg.sde_paths, "paths for the SDE estimate");
  hor->add_option("--tmax", horizon_cfg.sde_t_max, "censoring time for the SDE estimate");
  hor->add_flag("--bounds-only", horizon_cfg.bounds_only, "skip the grid solve");
  hor->add_option("--out", out_path, "output JSON path");

  auto* vol = app.add_subcommand("check-vol", "verify sufficient-volatility constraints");
  add_common(vol, false);
  vol->add_option("--cov", cov_path, "covariance CSV (header t,c11,...,cdd)")->required();
  vol->add_option("--out", out_path, "output JSON path");

  auto* self = app.add_subcommand("selftest", "run the built-in oracle suites");
  self->add_option("--seed", common.seed, "random seed");

  try {
    app.parse(argc, argv);
    if (evalf->parsed()) return cmd_eval_f(common, p_text, m_text);
    if (solve_cmd->parsed()) return cmd_solve(common, domain_path, solve_cfg, out_path);
    if (sim->parsed()) return cmd_simulate(common, domain_path, p_text, path_cfg, out_path);
    if (hor->parsed()) return cmd_horizon(common, weights_path, horizon_cfg, out_path);
    if (vol->parsed()) return cmd_check_vol(common, cov_path, out_path);
    if (self->parsed()) return cmd_selftest(common.seed);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << " (residual " << e.residual << ")\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
