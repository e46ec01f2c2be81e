#include <cmath>

#include "relarb/kernels.hpp"

namespace relarb::kernels::detail {

void interp_batch_scalar(const GridDesc& g, const double* values, const double* const* xs,
                         double* out, int64_t count) {
  const int n = g.n;
  const int corners = 1 << n;
  for (int64_t q = 0; q < count; ++q) {
    double frac[4];
    int32_t base = 0;
    bool dead = false;
    for (int d = 0; d < n; ++d) {
      const double t = (xs[d][q] - g.origin[d]) * g.inv_delta;
      if (t < -1e-9 || t > static_cast<double>(g.dims[d] - 1) + 1e-9) {
        dead = true;
        break;
      }
      double c = std::floor(t);
      if (c > static_cast<double>(g.dims[d] - 2)) c = static_cast<double>(g.dims[d] - 2);
      if (c < 0.0) c = 0.0;
      frac[d] = t - c;
      base += static_cast<int32_t>(c) * g.strides[d];
    }
    if (dead) {
      out[q] = 0.0;
      continue;
    }
    double acc = 0.0;
    for (int m = 0; m < corners; ++m) {
      double w = 1.0;
      int32_t idx = base;
      for (int d = 0; d < n; ++d) {
        if ((m >> d) & 1) {
          w *= frac[d];
          idx += g.strides[d];
        } else {
          w *= 1.0 - frac[d];
        }
      }
      const double v = w > 0.0 ? values[idx] : 0.0;
      acc += w * v;
    }
    out[q] = std::isnan(acc) ? 0.0 : acc;
  }
}

double max_abs_diff_scalar(const double* a, const double* b, int64_t count) {
  double worst = 0.0;
  for (int64_t i = 0; i < count; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace relarb::kernels::detail
