#pragma once

#include <optional>

#include "relarb/common.hpp"

namespace relarb {

// Small dense symmetric matrices and the ordered-eigenvalue functionals the
// covariance constraint set is built from. Dimensions are capped at 16; the
// cyclic Jacobi solver below is deterministic and accurate at that scale.

inline constexpr int kMaxDim = 16;

struct SymMatrix {
  int dim = 0;
  Vec entries;  // full row-major storage, symmetrized on construction

  SymMatrix() = default;
  SymMatrix(int n, const Vec& full);  // symmetrizes (a_ij + a_ji)/2

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Vec& d);
  /// sum_i c_i q_i q_i^T over the columns of `frame`
  static SymMatrix from_spectral(const Mat& frame, const Vec& coeffs);

  double& operator()(int i, int j) { return entries[static_cast<size_t>(i) * dim + j]; }
  double operator()(int i, int j) const { return entries[static_cast<size_t>(i) * dim + j]; }

  double norm_inf_entry() const;  // max |a_ij|
  double norm_frobenius() const;
  double trace() const;
};

SymMatrix sym_add(const SymMatrix& x, const SymMatrix& y);
SymMatrix sym_scale(const SymMatrix& x, double c);
/// O^T M O for a square O (change of basis)
SymMatrix sym_conjugate(const SymMatrix& m, const Mat& o);
double sym_inner(const SymMatrix& x, const SymMatrix& y);  // tr(xy)
double quad_form(const SymMatrix& m, const Vec& q);        // q^T M q

/// Ordered eigen-decomposition, eigenvalues non-increasing, frame columns
/// matching that order. Sign convention: first component of each eigenvector
/// with magnitude > 1e-12 is positive. Ties keep the Jacobi output order,
/// which for diagonal input is the axis order.
struct Spectrum {
  Vec eigenvalues;
  Mat frame;  // columns are the eigenvectors

  Vec eigenvector(int i) const { return frame.col(i); }
  double lambda_min() const { return eigenvalues.back(); }
  double lambda_max() const { return eigenvalues.front(); }
};

struct ProblemParams {
  int n;
  int k;
  double L;
  double tol_psd = 1e-9;

  ProblemParams(int n_, int k_, double L_, double tol = 1e-9);
};

/// Cyclic Jacobi, 100-sweep cap, convergence when the off-diagonal Frobenius
/// norm drops below 1e-12*(1+||M||_F). Throws ConvergenceError with the
/// residual otherwise.
Spectrum sym_eigen(const SymMatrix& m);

/// Sum of the m smallest eigenvalues (the trace operator over rank-m
/// orthogonal projections).
double pi_m(const SymMatrix& a, int m);

/// lambda_(n) >= -tol, lambda_(n-k) >= 1 - tol, lambda_(1) <= L + tol.
bool is_admissible(const SymMatrix& a, const ProblemParams& params);

/// Membership in the convex hull of the admissible eigenvalue set:
/// a PSD (to tolerance) and Pi_m(a) >= m - k for m = k+1..n. The cap
/// lambda_(1) <= L is a separate clause of is_admissible.
bool in_convexified_set(const SymMatrix& a, const ProblemParams& params);

/// (I - pp^T/|p|^2) M (I - pp^T/|p|^2) + min(lambda_min(M), 0) pp^T/|p|^2
/// when |p| > tol_grad, M otherwise. p/|p| becomes an eigenvector with
/// eigenvalue min(lambda_min(M), 0).
SymMatrix project_hessian(const Vec& p, const SymMatrix& m, double tol_grad = 0.0);

/// n-1 orthonormal vectors spanning p^perp, via the Householder reflection
/// carrying p/|p| to the last axis (columns of the reflector). Deterministic.
Mat orthonormal_complement(const Vec& p);

/// Orthonormal frame spanning the same subspace as the input columns, drawn
/// by QR of a seeded Gaussian matrix in subspace coordinates.
Mat random_frame(const Mat& subspace_frame, uint64_t seed);

namespace detail {
// Allocation-free cores used by the solver sweep; public API wraps these.
// All arrays are caller-owned scratch of the commented sizes.

// out: n x (n-1) column-major-free row-major frame (columns orthonormal, all
// perpendicular to p). Requires |p| > 0.
void householder_complement(const double* p, int n, double* out_cols /* n*(n-1) */);

// In-place QR orthonormalization (modified Gram-Schmidt, R_ii > 0 sign fix)
// of m columns of length m stored row-major in g (m x m).
void orthonormalize_square(double* g, int m);

// Fill g (m x m row-major) with seeded standard normals.
void fill_gaussian(double* g, int m, uint64_t seed);
}  // namespace detail

}  // namespace relarb
