#pragma once

#include "relarb/sde.hpp"
#include "relarb/solver.hpp"

namespace relarb {

// Stochastic-portfolio-theory front end: ingest market weights and
// covariance series in asset coordinates, verify the sufficient-volatility
// constraints through the simplex chart, and report the horizon
// T* = v(U mu(0)).

struct WeightSeries {
  int d = 0;
  Vec timestamps;  // strictly increasing
  std::vector<Vec> weights;
};

struct CovSeries {
  int d = 0;
  Vec timestamps;
  std::vector<SymMatrix> matrices;  // d x d, units 1/time
};

/// CSV with header "t,w1,...,wd"; rows validated against the simplex
/// (nonnegative, sum 1 within 1e-6).
WeightSeries parse_weights_csv(const std::string& text);

/// CSV with header "t,c11,c12,...,cdd" (row-major full matrix); symmetry
/// validated within 1e-10 relative.
CovSeries parse_cov_csv(const std::string& text);

struct VolatilityReport {
  Vec timestamps;
  std::vector<uint8_t> raw_eigenvalue_ok;  // lambda_(n-k) >= 1 on the chart
  std::vector<uint8_t> convexified_ok;     // the trace-operator hull conditions
  std::vector<uint8_t> cap_ok;             // lambda_(1) <= L
  double frac_raw = 0.0, frac_convexified = 0.0, frac_cap = 0.0;
  // Simplex-valued martingales should annihilate the all-ones vector; noisy
  // estimates often don't, so this is a warning, not an error.
  double max_ones_residual = 0.0;
  bool ones_warning = false;
};

VolatilityReport check_sufficient_volatility(const CovSeries& cov, const SimplexMap& map,
                                             const ProblemParams& params);

std::string volatility_report_json(const VolatilityReport& report, const ProblemParams& params);

struct HorizonConfig {
  double delta = 0.02;
  bool bounds_only = false;
  bool with_sde = true;
  uint64_t seed = 0;
  double sde_dt = 1e-3;
  int64_t sde_paths = 200;
  double sde_t_max = 0.0;  // 0: four times the ball envelope bound
  SolveConfig solve;       // delta/seed copied in
};

struct HorizonReport {
  bool solver_available = false;
  double t_star = 0.0;
  double upper_bound = 0.0;
  bool sde_available = false;
  double sde_estimate = 0.0;
  bool bracket_ok = true;  // sde <= T* <= envelope with 10% + 5 delta slack
  int grid_nodes = 0;
  int grid_interior = 0;
  double delta = 0.0;
  ProblemParams params;
  uint64_t seed = 0;
};

/// Embed the market, solve on the simplex image (d <= 4; otherwise
/// bounds-only or a resource error), and report T* with its bracket.
HorizonReport horizon(const Vec& mu0, const ProblemParams& params, const HorizonConfig& cfg);

std::string horizon_report_json(const HorizonReport& report);

}  // namespace relarb
