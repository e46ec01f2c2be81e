#pragma once

#include "relarb/symmat.hpp"

namespace relarb {

// The fully nonlinear operator
//   F(p, M) = inf{ -1/2 tr(Ma) : a >= 0, ap = 0,
//                  lambda_(n-k)(a) >= 1, lambda_(1)(a) <= L }
// evaluated through its spectral closed form, together with its
// semicontinuous envelopes (which differ only at p = 0) and an independent
// enumeration oracle.

struct ControlMatrix {
  enum class Provenance { ClosedFormPattern, OracleSample, SolverPolicy };
  SymMatrix a;
  Provenance provenance = Provenance::ClosedFormPattern;
};

struct FValue {
  double value = 0.0;
  std::optional<ControlMatrix> achieved_by;
};

/// Gradient-magnitude threshold below which p is treated as zero. The
/// operator is discontinuous in p at 0, so the branch is explicit.
double default_tol_grad(const SymMatrix& m);

/// Spectral closed form of F; achieved_by holds the minimizing control.
FValue f_closed(const Vec& p, const SymMatrix& m, const ProblemParams& params,
                double tol_grad = -1.0);

/// Lower semicontinuous envelope: equals F everywhere.
double f_lower(const Vec& p, const SymMatrix& m, const ProblemParams& params,
               double tol_grad = -1.0);

/// Upper semicontinuous envelope: equals F off p = 0; at p = 0 the index-
/// shifted sum (starting from the second largest eigenvalue).
double f_upper(const Vec& p, const SymMatrix& m, const ProblemParams& params,
               double tol_grad = -1.0);

/// The minimizing a = sum c_i q_i q_i^T over the eigenframe of M restricted
/// to p^perp (full space when p is below tol_grad).
ControlMatrix optimal_control(const Vec& p, const SymMatrix& m, const ProblemParams& params,
                              double tol_grad = -1.0);

/// Brute-force inf of -1/2 tr(Ma) over {0,1,L}-eigenvalue patterns on the
/// deflated eigenframe plus n_frames seeded random frames in p^perp. All
/// mandatory-direction subsets are enumerated for n <= 6.
double f_oracle(const Vec& p, const SymMatrix& m, const ProblemParams& params,
                int n_frames, uint64_t seed, double tol_grad = -1.0);

}  // namespace relarb
