#include "relarb/nonlinearity.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

namespace relarb {

namespace {

// Slope-L ramp on the positive side, identity on the nonpositive side.
double phi(double lam, double L) { return lam > 0.0 ? L * lam : lam; }
// Slope-L ramp on the positive side, zero otherwise.
double psi(double lam, double L) { return lam > 0.0 ? L * lam : 0.0; }

bool gradient_active(const Vec& p, const SymMatrix& m, double& tol_grad) {
  if (tol_grad < 0.0) tol_grad = default_tol_grad(m);
  return norm2(p) > tol_grad;
}

// Eigen-directions available to the control: the eigenframe of M compressed
// to p^perp when the gradient is active, the full eigenframe otherwise.
// Returns directions as columns, with their quadratic forms q^T M q.
void control_eigenframe(const Vec& p, const SymMatrix& m, bool active, Mat& dirs, Vec& forms) {
  if (!active) {
    const Spectrum s = sym_eigen(m);
    dirs = s.frame;
    forms = s.eigenvalues;
    return;
  }
  const Mat q = orthonormal_complement(p);
  const SymMatrix b = sym_conjugate(m, q);  // (n-1) x (n-1) compression
  const Spectrum s = sym_eigen(b);
  dirs = mat_mul(q, s.frame);
  forms = s.eigenvalues;
}

}  // namespace

double default_tol_grad(const SymMatrix& m) { return 1e-8 * (1.0 + m.norm_inf_entry()); }

FValue f_closed(const Vec& p, const SymMatrix& m, const ProblemParams& params, double tol_grad) {
  if (static_cast<int>(p.size()) != params.n || m.dim != params.n)
    throw ValidationError("f_closed: dimension mismatch");

  const bool active = gradient_active(p, m, tol_grad);
  const SymMatrix mp = active ? project_hessian(p, m, 0.0) : m;
  const Spectrum s = sym_eigen(mp);

  double value = 0.0;
  for (int i = 0; i < params.n - params.k; ++i) value -= 0.5 * phi(s.eigenvalues[i], params.L);
  for (int i = params.n - params.k; i < params.n; ++i) value -= 0.5 * psi(s.eigenvalues[i], params.L);

  FValue out;
  out.value = value;
  out.achieved_by = optimal_control(p, m, params, tol_grad);
  return out;
}

double f_lower(const Vec& p, const SymMatrix& m, const ProblemParams& params, double tol_grad) {
  return f_closed(p, m, params, tol_grad).value;
}

double f_upper(const Vec& p, const SymMatrix& m, const ProblemParams& params, double tol_grad) {
  bool active = gradient_active(p, m, tol_grad);
  if (active) return f_closed(p, m, params, tol_grad).value;

  // Index-shifted sum at p = 0: the top eigenvalue drops out.
  const Spectrum s = sym_eigen(m);
  double value = 0.0;
  for (int i = 1; i <= params.n - params.k; ++i) value -= 0.5 * phi(s.eigenvalues[i], params.L);
  for (int i = params.n - params.k + 1; i < params.n; ++i)
    value -= 0.5 * psi(s.eigenvalues[i], params.L);
  return value;
}

ControlMatrix optimal_control(const Vec& p, const SymMatrix& m, const ProblemParams& params,
                              double tol_grad) {
  if (static_cast<int>(p.size()) != params.n || m.dim != params.n)
    throw ValidationError("optimal_control: dimension mismatch");

  const bool active = gradient_active(p, m, tol_grad);
  Mat dirs;
  Vec forms;
  control_eigenframe(p, m, active, dirs, forms);

  Vec coeffs(forms.size());
  for (size_t i = 0; i < forms.size(); ++i) {
    if (static_cast<int>(i) < params.n - params.k)
      coeffs[i] = forms[i] > 0.0 ? params.L : 1.0;
    else
      coeffs[i] = forms[i] > 0.0 ? params.L : 0.0;
  }

  ControlMatrix out;
  out.a = SymMatrix::from_spectral(dirs, coeffs);
  out.provenance = ControlMatrix::Provenance::ClosedFormPattern;
  return out;
}

double f_oracle(const Vec& p, const SymMatrix& m, const ProblemParams& params, int n_frames,
                uint64_t seed, double tol_grad) {
  if (n_frames < 1) throw ValidationError("f_oracle: n_frames must be >= 1");
  const int n = params.n;
  const int mand = n - params.k;
  const bool active = gradient_active(p, m, tol_grad);

  // Candidate frames: the deflated eigenframe plus seeded random frames in
  // the same subspace.
  std::vector<Mat> frames;
  Mat eig_dirs;
  Vec eig_forms;
  control_eigenframe(p, m, active, eig_dirs, eig_forms);
  frames.push_back(eig_dirs);
  const Mat base = active ? orthonormal_complement(p) : Mat::identity(n);
  for (int f = 0; f < n_frames; ++f) frames.push_back(random_frame(base, mix_seed(seed, f)));

  double best = std::numeric_limits<double>::infinity();
  for (const Mat& frame : frames) {
    const int width = frame.cols;
    Vec forms(width);
    for (int c = 0; c < width; ++c) forms[c] = quad_form(m, frame.col(c));

    if (n <= 6) {
      // Every choice of which `mand` directions carry the >=1 weights, and
      // every {0,1,L} pattern consistent with that choice.
      for (uint32_t sel = 0; sel < (1u << width); ++sel) {
        if (std::popcount(sel) != mand) continue;
        for (uint32_t high = 0; high < (1u << width); ++high) {
          double val = 0.0;
          for (int c = 0; c < width; ++c) {
            const bool in_sel = (sel >> c) & 1u;
            const bool is_L = (high >> c) & 1u;
            const double w = is_L ? params.L : (in_sel ? 1.0 : 0.0);
            val -= 0.5 * w * forms[c];
          }
          best = std::min(best, val);
        }
      }
    } else {
      // Large-n fallback: mandatory weights go to the largest quadratic
      // forms, everything else by per-direction sign.
      std::vector<int> order(width);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return forms[a] > forms[b]; });
      double val = 0.0;
      for (int rank = 0; rank < width; ++rank) {
        const double d = forms[order[rank]];
        double w;
        if (d > 0.0)
          w = params.L;
        else
          w = rank < mand ? 1.0 : 0.0;
        val -= 0.5 * w * d;
      }
      best = std::min(best, val);
    }
  }
  return best;
}

}  // namespace relarb
