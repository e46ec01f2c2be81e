#include "relarb/spt.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace relarb {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("csv: bad ") + what + " value '" + s + "'");
  }
}

// rows of (t, payload...) with a fixed column count taken from the header
std::vector<Vec> parse_rows(const std::string& text, size_t cols, const char* what) {
  std::istringstream is(text);
  std::string line;
  std::vector<Vec> rows;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      first = false;  // header
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != cols)
      throw ValidationError(std::string("csv: ") + what + " row has wrong column count");
    Vec row(cols);
    for (size_t i = 0; i < cols; ++i) row[i] = parse_double(parts[i], what);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(std::string("csv: ") + what + " file has no data rows");
  return rows;
}

void check_increasing(const Vec& t, const char* what) {
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw ValidationError(std::string("csv: ") + what + " timestamps must be increasing");
}

}  // namespace

WeightSeries parse_weights_csv(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header)) throw ValidationError("weights csv: empty file");
  const auto head = split(header, ',');
  if (head.size() < 3 || head[0] != "t")
    throw ValidationError("weights csv: expected header t,w1,...,wd");

  WeightSeries series;
  series.d = static_cast<int>(head.size()) - 1;
  for (const Vec& row : parse_rows(text, head.size(), "weights")) {
    series.timestamps.push_back(row[0]);
    Vec w(row.begin() + 1, row.end());
    double sum = 0.0;
    for (double v : w) {
      if (v < -1e-6) throw ValidationError("weights csv: negative weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw ValidationError("weights csv: weights must sum to 1 within 1e-6");
    series.weights.push_back(std::move(w));
  }
  check_increasing(series.timestamps, "weights");
  return series;
}

CovSeries parse_cov_csv(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header)) throw ValidationError("covariance csv: empty file");
  const auto head = split(header, ',');
  if (head.size() < 2 || head[0] != "t")
    throw ValidationError("covariance csv: expected header t,c11,c12,...,cdd");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(head.size() - 1))));
  if (static_cast<size_t>(d) * d + 1 != head.size())
    throw ValidationError("covariance csv: column count is not 1 + d*d");

  CovSeries series;
  series.d = d;
  for (const Vec& row : parse_rows(text, head.size(), "covariance")) {
    series.timestamps.push_back(row[0]);
    Vec entries(row.begin() + 1, row.end());
    double scale = 0.0, asym = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        scale = std::max(scale, std::abs(entries[static_cast<size_t>(i) * d + j]));
        asym = std::max(asym, std::abs(entries[static_cast<size_t>(i) * d + j] -
                                       entries[static_cast<size_t>(j) * d + i]));
      }
    if (asym > 1e-10 * (1.0 + scale))
      throw ValidationError("covariance csv: matrix is not symmetric within 1e-10");
    series.matrices.emplace_back(d, entries);
  }
  check_increasing(series.timestamps, "covariance");
  return series;
}

VolatilityReport check_sufficient_volatility(const CovSeries& cov, const SimplexMap& map,
                                             const ProblemParams& params) {
  if (cov.d != params.n + 1 || map.d != cov.d)
    throw ValidationError("check_sufficient_volatility: need d = n + 1 matching the chart");

  VolatilityReport report;
  report.timestamps = cov.timestamps;
  const int n = params.n;
  size_t raw = 0, conv = 0, cap = 0;
  for (size_t ti = 0; ti < cov.matrices.size(); ++ti) {
    const SymMatrix& chat = cov.matrices[ti];

    Vec c_ones(cov.d, 0.0);
    for (int i = 0; i < cov.d; ++i)
      for (int j = 0; j < cov.d; ++j) c_ones[i] += chat(i, j);
    report.max_ones_residual = std::max(report.max_ones_residual, norm_inf(c_ones));

    const SymMatrix mapped = map_covariance(map, chat);
    const Spectrum spec = sym_eigen(mapped);
    const bool raw_ok = spec.lambda_min() >= -params.tol_psd &&
                        spec.eigenvalues[n - params.k - 1] >= 1.0 - params.tol_psd;
    const bool conv_ok = in_convexified_set(mapped, params);
    const bool cap_ok = spec.lambda_max() <= params.L + params.tol_psd;
    report.raw_eigenvalue_ok.push_back(raw_ok ? 1 : 0);
    report.convexified_ok.push_back(conv_ok ? 1 : 0);
    report.cap_ok.push_back(cap_ok ? 1 : 0);
    raw += raw_ok;
    conv += conv_ok;
    cap += cap_ok;
  }
  const double total = static_cast<double>(cov.matrices.size());
  report.frac_raw = raw / total;
  report.frac_convexified = conv / total;
  report.frac_cap = cap / total;
  report.ones_warning = report.max_ones_residual > 1e-8;
  return report;
}

std::string volatility_report_json(const VolatilityReport& report, const ProblemParams& params) {
  nlohmann::json j;
  j["timestamps"] = report.timestamps;
  j["raw_eigenvalue_ok"] = report.raw_eigenvalue_ok;
  j["convexified_ok"] = report.convexified_ok;
  j["cap_ok"] = report.cap_ok;
  j["frac_raw"] = report.frac_raw;
  j["frac_convexified"] = report.frac_convexified;
  j["frac_cap"] = report.frac_cap;
  j["max_ones_residual"] = report.max_ones_residual;
  j["ones_warning"] = report.ones_warning;
  j["params"] = {{"n", params.n}, {"k", params.k}, {"L", params.L}};
  j["version"] = kVersion;
  return j.dump(2);
}

HorizonReport horizon(const Vec& mu0, const ProblemParams& params, const HorizonConfig& cfg) {
  const int d = static_cast<int>(mu0.size());
  if (d != params.n + 1) throw ValidationError("horizon: weight dimension must be params.n + 1");
  if (d > 4 && !cfg.bounds_only)
    throw ResourceError("horizon: full grid solve supports d <= 4; rerun with bounds-only mode");

  const Domain dom = make_simplex_image(d);
  const SimplexMap& chart = std::get<SimplexImage>(dom.shape).embedding;
  const Vec x0 = map_point(chart, mu0);

  HorizonReport report{.params = params};
  report.seed = cfg.seed;
  report.delta = cfg.delta;
  report.upper_bound = ball_envelope(dom, params, x0);

  if (!cfg.bounds_only) {
    SolveConfig solve_cfg = cfg.solve;
    solve_cfg.delta = cfg.delta;
    solve_cfg.seed = cfg.seed;
    const SolveResult res = solve(dom, params, solve_cfg);
    report.solver_available = true;
    report.t_star = sample_value(res.field, x0);
    report.grid_nodes = static_cast<int>(res.field.grid.node_count);
    report.grid_interior = static_cast<int>(res.field.grid.interior.size());
  }

  if (cfg.with_sde) {
    PathConfig pc;
    pc.dt = cfg.sde_dt;
    pc.n_paths = cfg.sde_paths;
    pc.t_max = cfg.sde_t_max > 0.0 ? cfg.sde_t_max : std::max(4.0 * report.upper_bound, 1.0);
    pc.seed = mix_seed(cfg.seed, 0x5dee5eedULL);
    const ExitStats stats =
        simulate_exit(dom, params, make_tangential_control(params.n - params.k + 1), x0, pc);
    if (!stats.all_censored) {
      report.sde_available = true;
      report.sde_estimate = stats.min;
    }
  }

  const double slack = 0.10 * std::max(report.upper_bound, 1e-12) + 5.0 * cfg.delta;
  if (report.solver_available) {
    if (report.t_star > report.upper_bound + slack) report.bracket_ok = false;
    if (report.sde_available && report.sde_estimate > report.t_star + slack)
      report.bracket_ok = false;
  } else if (report.sde_available && report.sde_estimate > report.upper_bound + slack) {
    report.bracket_ok = false;
  }
  return report;
}

std::string horizon_report_json(const HorizonReport& report) {
  nlohmann::json j;
  if (report.solver_available)
    j["T_star"] = report.t_star;
  else
    j["T_star"] = nullptr;
  j["upper_bound"] = report.upper_bound;
  if (report.sde_available)
    j["sde_estimate"] = report.sde_estimate;
  else
    j["sde_estimate"] = nullptr;
  j["params"] = {{"n", report.params.n}, {"k", report.params.k}, {"L", report.params.L}};
  if (report.solver_available)
    j["grid"] = {{"delta", report.delta},
                 {"nodes", report.grid_nodes},
                 {"interior", report.grid_interior}};
  else
    j["grid"] = nullptr;
  j["bracket_ok"] = report.bracket_ok;
  j["seed"] = report.seed;
  j["version"] = kVersion;
  return j.dump(2);
}

}  // namespace relarb
