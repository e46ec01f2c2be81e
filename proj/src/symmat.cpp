#include "relarb/symmat.hpp"

#include <algorithm>
#include <numeric>

namespace relarb {

SymMatrix::SymMatrix(int n, const Vec& full) : dim(n), entries(full) {
  if (n < 1) throw ValidationError("SymMatrix: dim must be >= 1");
  if (static_cast<size_t>(n) * n != full.size())
    throw ValidationError("SymMatrix: entry count does not match dim");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = s;
      (*this)(j, i) = s;
    }
}

SymMatrix SymMatrix::zero(int n) { return SymMatrix(n, Vec(static_cast<size_t>(n) * n, 0.0)); }

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m = zero(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
  SymMatrix m = zero(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim; ++i) m(i, i) = d[i];
  return m;
}

SymMatrix SymMatrix::from_spectral(const Mat& frame, const Vec& coeffs) {
  SymMatrix m = zero(frame.rows);
  for (int c = 0; c < frame.cols; ++c) {
    const double w = coeffs[c];
    if (w == 0.0) continue;
    for (int i = 0; i < frame.rows; ++i)
      for (int j = 0; j < frame.rows; ++j) m(i, j) += w * frame(i, c) * frame(j, c);
  }
  return m;
}

double SymMatrix::norm_inf_entry() const {
  double s = 0.0;
  for (double v : entries) s = std::max(s, std::abs(v));
  return s;
}

double SymMatrix::norm_frobenius() const {
  double s = 0.0;
  for (double v : entries) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (*this)(i, i);
  return s;
}

SymMatrix sym_add(const SymMatrix& x, const SymMatrix& y) {
  SymMatrix z = x;
  for (size_t i = 0; i < z.entries.size(); ++i) z.entries[i] += y.entries[i];
  return z;
}

SymMatrix sym_scale(const SymMatrix& x, double c) {
  SymMatrix z = x;
  for (double& v : z.entries) v *= c;
  return z;
}

SymMatrix sym_conjugate(const SymMatrix& m, const Mat& o) {
  Mat mm(m.dim, m.dim);
  mm.a = m.entries;
  const Mat r = mat_mul(mat_mul(mat_transpose(o), mm), o);
  return SymMatrix(o.cols, r.a);
}

double sym_inner(const SymMatrix& x, const SymMatrix& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.entries.size(); ++i) s += x.entries[i] * y.entries[i];
  return s;
}

double quad_form(const SymMatrix& m, const Vec& q) {
  double s = 0.0;
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) s += q[i] * m(i, j) * q[j];
  return s;
}

ProblemParams::ProblemParams(int n_, int k_, double L_, double tol) : n(n_), k(k_), L(L_), tol_psd(tol) {
  if (n < 2) throw ValidationError("params: n must be >= 2");
  if (k < 1 || k > n - 1) throw ValidationError("params: k must lie in {1,...,n-1}");
  if (L < 1.0) throw ValidationError("params: L must be >= 1");
  if (tol_psd < 0.0) throw ValidationError("params: tol_psd must be nonnegative");
}

namespace {

double offdiag_frobenius(const SymMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = i + 1; j < a.dim; ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

Spectrum sym_eigen(const SymMatrix& m) {
  const int n = m.dim;
  if (n > kMaxDim) throw ValidationError("sym_eigen: dim exceeds cap of 16");

  SymMatrix a = m;
  Mat v = Mat::identity(n);
  const double target = 1e-12 * (1.0 + m.norm_frobenius());

  bool converged = false;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    if (offdiag_frobenius(a) < target) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(p, i) = a(i, p);
          a(i, q) = s * aip + c * aiq;
          a(q, i) = a(i, q);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  if (!converged && offdiag_frobenius(a) >= target)
    throw ConvergenceError("sym_eigen: Jacobi did not converge in 100 sweeps", offdiag_frobenius(a));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  Spectrum spec;
  spec.eigenvalues.resize(n);
  spec.frame = Mat(n, n);
  for (int c = 0; c < n; ++c) {
    const int src = order[c];
    spec.eigenvalues[c] = a(src, src);
    double sign = 1.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i, src)) > 1e-12) {
        sign = v(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (int i = 0; i < n; ++i) spec.frame(i, c) = sign * v(i, src);
  }
  return spec;
}

double pi_m(const SymMatrix& a, int m) {
  if (m < 1 || m > a.dim) throw ValidationError("pi_m: m out of range");
  const Spectrum s = sym_eigen(a);
  double sum = 0.0;
  for (int i = a.dim - m; i < a.dim; ++i) sum += s.eigenvalues[i];
  return sum;
}

bool is_admissible(const SymMatrix& a, const ProblemParams& params) {
  if (a.dim != params.n) throw ValidationError("is_admissible: dimension mismatch");
  const Spectrum s = sym_eigen(a);
  return s.lambda_min() >= -params.tol_psd &&
         s.eigenvalues[params.n - params.k - 1] >= 1.0 - params.tol_psd &&
         s.lambda_max() <= params.L + params.tol_psd;
}

bool in_convexified_set(const SymMatrix& a, const ProblemParams& params) {
  if (a.dim != params.n) throw ValidationError("in_convexified_set: dimension mismatch");
  const Spectrum s = sym_eigen(a);
  if (s.lambda_min() < -params.tol_psd) return false;
  double tail = 0.0;  // sum of the m smallest, grown incrementally
  for (int m = 1; m <= params.n; ++m) {
    tail += s.eigenvalues[params.n - m];
    if (m >= params.k + 1 && tail < static_cast<double>(m - params.k) - params.tol_psd) return false;
  }
  return true;
}

SymMatrix project_hessian(const Vec& p, const SymMatrix& m, double tol_grad) {
  const double pn = norm2(p);
  if (!(pn > tol_grad)) return m;

  const int n = m.dim;
  Vec u(n);
  for (int i = 0; i < n; ++i) u[i] = p[i] / pn;

  // t = M u, and the rank-one corrections of (I - uu^T) M (I - uu^T)
  Vec t(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[i] += m(i, j) * u[j];
  const double utu = dot(u, t);

  const double floor_ev = std::min(sym_eigen(m).lambda_min(), 0.0);
  SymMatrix r = m;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r(i, j) += (utu + floor_ev) * u[i] * u[j] - t[i] * u[j] - u[i] * t[j];
  return r;
}

namespace detail {

void householder_complement(const double* p, int n, double* out_cols) {
  double pn = 0.0;
  for (int i = 0; i < n; ++i) pn += p[i] * p[i];
  pn = std::sqrt(pn);

  double u[kMaxDim];
  for (int i = 0; i < n; ++i) u[i] = p[i] / pn;

  // Reflect u onto s*e_n with s chosen away from cancellation.
  const double s = u[n - 1] >= 0.0 ? -1.0 : 1.0;
  double w[kMaxDim];
  for (int i = 0; i < n; ++i) w[i] = u[i];
  w[n - 1] -= s;
  const double beta = 2.0 / (2.0 * (1.0 + std::abs(u[n - 1])));

  // columns H e_c for c = 0..n-2, stored row-major n x (n-1)
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n - 1; ++c)
      out_cols[static_cast<size_t>(i) * (n - 1) + c] = (i == c ? 1.0 : 0.0) - beta * w[i] * w[c];
}

void fill_gaussian(double* g, int m, uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < m * m; ++i) g[i] = rng.normal();
}

void orthonormalize_square(double* g, int m) {
  for (int c = 0; c < m; ++c) {
    for (int prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (int i = 0; i < m; ++i) proj += g[i * m + prev] * g[i * m + c];
      for (int i = 0; i < m; ++i) g[i * m + c] -= proj * g[i * m + prev];
    }
    double nrm = 0.0;
    for (int i = 0; i < m; ++i) nrm += g[i * m + c] * g[i * m + c];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-14) {
      // Degenerate draw; fall back to the axis direction and re-orthogonalize.
      for (int i = 0; i < m; ++i) g[i * m + c] = (i == c) ? 1.0 : 0.0;
      for (int prev = 0; prev < c; ++prev) {
        double proj = 0.0;
        for (int i = 0; i < m; ++i) proj += g[i * m + prev] * g[i * m + c];
        for (int i = 0; i < m; ++i) g[i * m + c] -= proj * g[i * m + prev];
      }
      nrm = 0.0;
      for (int i = 0; i < m; ++i) nrm += g[i * m + c] * g[i * m + c];
      nrm = std::sqrt(nrm);
    }
    for (int i = 0; i < m; ++i) g[i * m + c] /= nrm;
  }
}

}  // namespace detail

Mat orthonormal_complement(const Vec& p) {
  const int n = static_cast<int>(p.size());
  if (n > kMaxDim) throw ValidationError("orthonormal_complement: dim exceeds cap of 16");
  if (norm2(p) == 0.0) throw ValidationError("orthonormal_complement: zero vector");
  Mat out(n, n - 1);
  detail::householder_complement(p.data(), n, out.a.data());
  return out;
}

Mat random_frame(const Mat& subspace_frame, uint64_t seed) {
  const int m = subspace_frame.cols;
  if (m == 0) return subspace_frame;
  double g[kMaxDim * kMaxDim];
  detail::fill_gaussian(g, m, seed);
  detail::orthonormalize_square(g, m);
  Mat out(subspace_frame.rows, m);
  for (int i = 0; i < subspace_frame.rows; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int c = 0; c < m; ++c) s += subspace_frame(i, c) * g[c * m + j];
      out(i, j) = s;
    }
  return out;
}

}  // namespace relarb
