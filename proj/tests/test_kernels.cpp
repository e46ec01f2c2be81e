#include <doctest.h>

#include <cmath>
#include <limits>

#include "relarb/common.hpp"
#include "relarb/kernels.hpp"

using namespace relarb;
namespace kn = relarb::kernels;

namespace {

struct TestGrid {
  kn::GridDesc desc;
  Vec values;
};

// Random grid with NaN holes (off-domain nodes) in random places.
TestGrid random_grid(Rng& rng, int n) {
  TestGrid g;
  g.desc.n = n;
  int64_t count = 1;
  for (int d = 0; d < n; ++d) {
    g.desc.dims[d] = 3 + static_cast<int>(rng.next_u64() % 6);
    g.desc.origin[d] = rng.uniform(-2.0, 2.0);
    count *= g.desc.dims[d];
  }
  g.desc.inv_delta = 1.0 / rng.uniform(0.05, 0.5);
  for (int d = n - 1; d >= 0; --d)
    g.desc.strides[d] = d == n - 1 ? 1 : g.desc.strides[d + 1] * g.desc.dims[d + 1];
  g.values.resize(count);
  for (double& v : g.values)
    v = rng.uniform() < 0.15 ? std::numeric_limits<double>::quiet_NaN() : rng.uniform(0.0, 3.0);
  return g;
}

}  // namespace

TEST_CASE("interp: exact at nodes, linear between, zero outside") {
  kn::GridDesc g;
  g.n = 2;
  g.dims[0] = 3;
  g.dims[1] = 3;
  g.origin[0] = 0.0;
  g.origin[1] = 0.0;
  g.inv_delta = 1.0;
  g.strides[0] = 3;
  g.strides[1] = 1;
  Vec values = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};

  const auto sample = [&](double x, double y) {
    const double* xs[2] = {&x, &y};
    double out = 0.0;
    kn::interp_batch(g, values.data(), xs, &out, 1);
    return out;
  };

  CHECK(sample(1.0, 2.0) == 5.0);          // exact node
  CHECK(sample(0.5, 0.0) == 1.5);          // midpoint along axis 0: (0 + 3)/2
  CHECK(sample(0.0, 0.5) == 0.5);          // midpoint along axis 1: (0 + 1)/2
  CHECK(sample(2.0, 2.0) == 8.0);          // top corner, weight-1 path only
  CHECK(sample(-0.5, 0.0) == 0.0);         // out of grid
  CHECK(sample(0.0, 2.5) == 0.0);

  // NaN hole: positive-weight contact zeroes the sample, zero-weight does not
  values[4] = std::numeric_limits<double>::quiet_NaN();  // node (1,1)
  CHECK(sample(1.2, 1.2) == 0.0);
  CHECK(sample(1.0, 1.0) == 0.0);  // the hole itself
  CHECK(sample(0.25, 0.0) == doctest::Approx(0.75));  // cell without the hole
  CHECK(sample(2.0, 1.5) == doctest::Approx(0.5 * 7.0 + 0.5 * 8.0));  // hole has weight 0 here
  CHECK(sample(0.0, 1.0) == 1.0);  // hole corner has weight 0 at this node
}

TEST_CASE("interp: one-dimensional midpoint example") {
  kn::GridDesc g;
  g.n = 1;
  g.dims[0] = 2;
  g.origin[0] = 0.0;
  g.inv_delta = 1.0;
  g.strides[0] = 1;
  const Vec values = {0.0, 2.0};
  double x = 0.5, out = 0.0;
  const double* xs[1] = {&x};
  kn::interp_batch(g, values.data(), xs, &out, 1);
  CHECK(out == 1.0);
}

TEST_CASE("kernel equivalence: scalar vs active backend, bitwise") {
  const kn::Backend saved = kn::active_backend();
  if (!kn::set_backend(kn::Backend::Avx2)) {
    MESSAGE("AVX2 not available; skipping equivalence test");
    return;
  }

  Rng rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const TestGrid g = random_grid(rng, n);
    const int64_t count = 37;  // odd: exercises the SIMD tail
    std::vector<double> coords[4];
    const double* xs[4];
    for (int d = 0; d < n; ++d) {
      coords[d].resize(count);
      for (auto& c : coords[d]) {
        const double span = (g.desc.dims[d] - 1) / g.desc.inv_delta;
        c = g.desc.origin[d] + rng.uniform(-0.2 * span, 1.2 * span);
        if (rng.uniform() < 0.1)  // land exactly on a node
          c = g.desc.origin[d] +
              static_cast<double>(rng.next_u64() % g.desc.dims[d]) / g.desc.inv_delta;
      }
      xs[d] = coords[d].data();
    }
    Vec out_simd(count), out_scalar(count);
    kn::set_backend(kn::Backend::Avx2);
    kn::interp_batch(g.desc, g.values.data(), xs, out_simd.data(), count);
    kn::set_backend(kn::Backend::Scalar);
    kn::interp_batch(g.desc, g.values.data(), xs, out_scalar.data(), count);
    for (int64_t i = 0; i < count; ++i) CHECK(out_simd[i] == out_scalar[i]);
  }

  // reduction kernel
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t len = 1 + static_cast<int64_t>(rng.next_u64() % 200);
    Vec a(len), b(len);
    for (int64_t i = 0; i < len; ++i) {
      a[i] = rng.uniform(-5.0, 5.0);
      b[i] = rng.uniform(-5.0, 5.0);
    }
    kn::set_backend(kn::Backend::Avx2);
    const double d1 = kn::max_abs_diff(a.data(), b.data(), len);
    kn::set_backend(kn::Backend::Scalar);
    const double d2 = kn::max_abs_diff(a.data(), b.data(), len);
    CHECK(d1 == d2);
  }

  kn::set_backend(saved);
}

TEST_CASE("max_abs_diff basics") {
  const Vec a = {1.0, -2.0, 3.0};
  const Vec b = {1.5, -2.0, 7.0};
  CHECK(kn::max_abs_diff(a.data(), b.data(), 3) == 4.0);
  CHECK(kn::max_abs_diff(a.data(), a.data(), 3) == 0.0);
}
