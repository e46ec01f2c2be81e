#include <doctest.h>

#include "relarb/symmat.hpp"

using namespace relarb;

namespace {

SymMatrix random_sym(Rng& rng, int n, double scale = 5.0) {
  Vec e(static_cast<size_t>(n) * n);
  for (double& v : e) v = rng.uniform(-scale, scale);
  return SymMatrix(n, e);
}

SymMatrix random_psd(Rng& rng, int n, double scale = 2.0) {
  // G G^T is PSD for any G
  Mat g(n, n);
  for (double& v : g.a) v = rng.uniform(-scale, scale);
  const Mat gt = mat_transpose(g);
  return SymMatrix(n, mat_mul(g, gt).a);
}

double reconstruction_residual(const SymMatrix& m, const Spectrum& s) {
  const SymMatrix r = SymMatrix::from_spectral(s.frame, s.eigenvalues);
  double worst = 0.0;
  for (size_t i = 0; i < m.entries.size(); ++i)
    worst = std::max(worst, std::abs(r.entries[i] - m.entries[i]));
  return worst;
}

double gram_residual(const Mat& frame) {
  double worst = 0.0;
  for (int i = 0; i < frame.cols; ++i)
    for (int j = 0; j < frame.cols; ++j) {
      const double g = dot(frame.col(i), frame.col(j));
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

}  // namespace

TEST_CASE("sym_eigen: diagonal input keeps axis frame, reordered") {
  const Spectrum s = sym_eigen(SymMatrix::diagonal({3.0, 1.0, 2.0}));
  CHECK(s.eigenvalues == Vec{3.0, 2.0, 1.0});
  // frame columns e1, e3, e2
  CHECK(s.frame(0, 0) == 1.0);
  CHECK(s.frame(2, 1) == 1.0);
  CHECK(s.frame(1, 2) == 1.0);
}

TEST_CASE("sym_eigen: identity ties break to identity frame") {
  const Spectrum s = sym_eigen(SymMatrix::identity(3));
  CHECK(s.eigenvalues == Vec{1.0, 1.0, 1.0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(s.frame(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("sym_eigen: 2x2 with known spectrum") {
  const SymMatrix m(2, {2.0, 1.0, 1.0, 2.0});
  const Spectrum s = sym_eigen(m);
  CHECK(s.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-13));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(s.frame(0, 0) == doctest::Approx(inv_sqrt2));
  CHECK(s.frame(1, 0) == doctest::Approx(inv_sqrt2));
  CHECK(s.frame(0, 1) == doctest::Approx(inv_sqrt2));
  CHECK(s.frame(1, 1) == doctest::Approx(-inv_sqrt2));
  CHECK(reconstruction_residual(m, s) < 1e-12);
}

TEST_CASE("sym_eigen: reconstruction and orthonormality over random draws") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const SymMatrix m = random_sym(rng, n);
    const Spectrum s = sym_eigen(m);
    const double scale = 1.0 + m.norm_inf_entry();
    CHECK(reconstruction_residual(m, s) < 1e-10 * scale);
    CHECK(gram_residual(s.frame) < 1e-10);
    for (int i = 0; i + 1 < n; ++i) CHECK(s.eigenvalues[i] >= s.eigenvalues[i + 1]);
  }
}

TEST_CASE("sym_eigen: determinism") {
  Rng rng(7);
  const SymMatrix m = random_sym(rng, 5);
  const Spectrum a = sym_eigen(m);
  const Spectrum b = sym_eigen(m);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.frame.a == b.frame.a);
}

TEST_CASE("pi_m: examples") {
  const SymMatrix d312 = SymMatrix::diagonal({3.0, 1.0, 2.0});
  CHECK(pi_m(d312, 1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(pi_m(SymMatrix::identity(3), 3) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(pi_m(d312, 2) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK_THROWS_AS(pi_m(d312, 0), ValidationError);
  CHECK_THROWS_AS(pi_m(d312, 4), ValidationError);
}

TEST_CASE("pi_m: minimum of tr(aP) over random rank-2 projections") {
  // Independent check of the eigenvalue formula: sampled projections can
  // approach but never undercut the sum of the two smallest eigenvalues.
  const SymMatrix a = SymMatrix::diagonal({3.0, 1.0, 2.0});
  const double target = pi_m(a, 2);
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 500; ++trial) {
    const Mat q = random_frame(Mat::identity(3), mix_seed(99, trial));
    // rank-2 projection from the first two columns
    double tr = 0.0;
    for (int c = 0; c < 2; ++c) tr += quad_form(a, q.col(c));
    CHECK(tr >= target - 1e-9);
    best = std::min(best, tr);
  }
  CHECK(best < target + 0.5);  // sampling gets reasonably close
}

TEST_CASE("is_admissible: examples at n=2, k=1, L=2") {
  const ProblemParams params(2, 1, 2.0);
  CHECK(is_admissible(SymMatrix::diagonal({1.0, 0.0}), params));
  CHECK_FALSE(is_admissible(SymMatrix::diagonal({3.0, 0.0}), params));
  CHECK_FALSE(is_admissible(SymMatrix::diagonal({0.5, 0.5}), params));
}

TEST_CASE("in_convexified_set: examples at n=2, k=1") {
  const ProblemParams params(2, 1, 2.0);
  CHECK(in_convexified_set(SymMatrix::diagonal({1.0, 0.0}), params));
  CHECK(in_convexified_set(SymMatrix::diagonal({0.5, 0.5}), params));
  CHECK_FALSE(in_convexified_set(SymMatrix::diagonal({0.4, 0.4}), params));
}

TEST_CASE("pi_m concavity on random PSD pairs") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const SymMatrix a = random_psd(rng, n);
    const SymMatrix b = random_psd(rng, n);
    const double c = rng.uniform(0.05, 0.95);
    const SymMatrix mix = sym_add(sym_scale(a, c), sym_scale(b, 1.0 - c));
    for (int m = 1; m <= n; ++m)
      CHECK(pi_m(mix, m) >= c * pi_m(a, m) + (1.0 - c) * pi_m(b, m) - 1e-9);
  }
}

TEST_CASE("convex combinations of eigenvalue-admissible matrices stay in the hull") {
  Rng rng(12);
  const ProblemParams params(3, 1, 8.0);
  for (int trial = 0; trial < 300; ++trial) {
    // two random matrices with lambda_(n-k) >= 1, by construction
    SymMatrix parts[2];
    for (auto& part : parts) {
      const Mat q = random_frame(Mat::identity(3), rng.next_u64());
      Vec ev = {rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0), rng.uniform(0.0, 3.0)};
      std::sort(ev.begin(), ev.end(), std::greater<>());
      part = SymMatrix::from_spectral(q, ev);
    }
    const double c = rng.uniform(0.0, 1.0);
    const SymMatrix mix = sym_add(sym_scale(parts[0], c), sym_scale(parts[1], 1.0 - c));
    CHECK(in_convexified_set(mix, params));
  }
}

TEST_CASE("project_hessian: examples") {
  SUBCASE("zero gradient returns M") {
    const SymMatrix m(2, {4.0, 1.0, 1.0, -6.0});
    const SymMatrix r = project_hessian({0.0, 0.0}, m);
    CHECK(r.entries == m.entries);
  }
  SUBCASE("p = e1, M = diag(4,-6)") {
    const SymMatrix r = project_hessian({1.0, 0.0}, SymMatrix::diagonal({4.0, -6.0}));
    CHECK(r(0, 0) == doctest::Approx(-6.0).epsilon(1e-13));
    CHECK(r(1, 1) == doctest::Approx(-6.0).epsilon(1e-13));
    CHECK(std::abs(r(0, 1)) < 1e-13);
  }
  SUBCASE("p = e1, M = diag(4,6): nonnegative floor") {
    const SymMatrix r = project_hessian({1.0, 0.0}, SymMatrix::diagonal({4.0, 6.0}));
    CHECK(std::abs(r(0, 0)) < 1e-13);
    CHECK(r(1, 1) == doctest::Approx(6.0).epsilon(1e-13));
  }
  SUBCASE("p/|p| is an eigenvector with eigenvalue min(lambda_min, 0)") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 3);
      const SymMatrix m = random_sym(rng, n);
      Vec p(n);
      for (double& v : p) v = rng.uniform(-2.0, 2.0);
      if (norm2(p) < 1e-6) continue;
      const SymMatrix r = project_hessian(p, m);
      const double target = std::min(sym_eigen(m).lambda_min(), 0.0);
      Vec rp(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rp[i] += r(i, j) * p[j];
      for (int i = 0; i < n; ++i) CHECK(rp[i] == doctest::Approx(target * p[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("project_hessian: Poincare interlacing") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const SymMatrix m = random_sym(rng, n);
    Vec p(n);
    for (double& v : p) v = rng.uniform(-2.0, 2.0);
    if (norm2(p) < 1e-6) continue;
    const Vec lam = sym_eigen(m).eigenvalues;
    const Vec mu = sym_eigen(project_hessian(p, m)).eigenvalues;
    const double slack = 1e-9 * (1.0 + m.norm_inf_entry());
    for (int i = 0; i + 1 < n; ++i) CHECK(mu[i] >= lam[i + 1] - slack);
  }
}

TEST_CASE("orthonormal_complement: examples") {
  SUBCASE("p = e1 in the plane") {
    const Mat f = orthonormal_complement({1.0, 0.0});
    CHECK(f.cols == 1);
    CHECK(std::abs(f(0, 0)) < 1e-14);
    CHECK(std::abs(std::abs(f(1, 0)) - 1.0) < 1e-14);
  }
  SUBCASE("diagonal direction") {
    const double s = 1.0 / std::sqrt(2.0);
    const Mat f = orthonormal_complement({s, s});
    CHECK(std::abs(f(0, 0) * s + f(1, 0) * s) < 1e-12);
    CHECK(norm2(f.col(0)) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("n = 4 gives an orthonormal triple") {
    const Mat f = orthonormal_complement({0.3, -1.2, 0.5, 2.0});
    CHECK(f.cols == 3);
    CHECK(gram_residual(f) < 1e-12);
  }
  CHECK_THROWS_AS(orthonormal_complement({0.0, 0.0}), ValidationError);
}

TEST_CASE("random_frame: determinism, orthonormality, span") {
  const Mat base = orthonormal_complement({1.0, 1.0, -0.5});
  const Mat a = random_frame(base, 42);
  const Mat b = random_frame(base, 42);
  CHECK(a.a == b.a);
  CHECK(gram_residual(a) < 1e-10);
  // span check: projection of each output vector onto the input span has norm 1
  for (int c = 0; c < a.cols; ++c) {
    const Vec q = a.col(c);
    double proj_sq = 0.0;
    for (int b2 = 0; b2 < base.cols; ++b2) {
      const double pr = dot(q, base.col(b2));
      proj_sq += pr * pr;
    }
    CHECK(std::sqrt(proj_sq) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("random_frame: different seeds differ") {
  const Mat base = Mat::identity(3);
  const Mat a = random_frame(base, 1);
  const Mat b = random_frame(base, 2);
  CHECK(a.a != b.a);
}
