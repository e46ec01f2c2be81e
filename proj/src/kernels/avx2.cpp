#include "relarb/kernels.hpp"

#if defined(RELARB_HAVE_AVX2)

#include <immintrin.h>

namespace relarb::kernels::detail {

// Four queries per iteration; per-lane arithmetic mirrors the scalar kernel
// operation for operation, so outputs are bit-identical to it.
void interp_batch_avx2(const GridDesc& g, const double* values, const double* const* xs,
                       double* out, int64_t count) {
  const int n = g.n;
  const int corners = 1 << n;
  const __m256d ones = _mm256_set1_pd(1.0);
  const __m256d zeros = _mm256_setzero_pd();

  int64_t q = 0;
  for (; q + 4 <= count; q += 4) {
    __m256d frac[4];
    __m128i base = _mm_setzero_si128();
    __m256d dead = zeros;
    for (int d = 0; d < n; ++d) {
      const __m256d x = _mm256_loadu_pd(xs[d] + q);
      const __m256d t =
          _mm256_mul_pd(_mm256_sub_pd(x, _mm256_set1_pd(g.origin[d])), _mm256_set1_pd(g.inv_delta));
      const __m256d hi = _mm256_set1_pd(static_cast<double>(g.dims[d] - 1) + 1e-9);
      dead = _mm256_or_pd(dead, _mm256_cmp_pd(t, _mm256_set1_pd(-1e-9), _CMP_LT_OQ));
      dead = _mm256_or_pd(dead, _mm256_cmp_pd(t, hi, _CMP_GT_OQ));

      __m256d c = _mm256_floor_pd(t);
      c = _mm256_min_pd(c, _mm256_set1_pd(static_cast<double>(g.dims[d] - 2)));
      c = _mm256_max_pd(c, zeros);
      frac[d] = _mm256_sub_pd(t, c);

      const __m128i ci = _mm256_cvttpd_epi32(c);
      base = _mm_add_epi32(base, _mm_mullo_epi32(ci, _mm_set1_epi32(g.strides[d])));
    }

    __m256d acc = zeros;
    for (int m = 0; m < corners; ++m) {
      __m256d w = ones;
      __m128i idx = base;
      for (int d = 0; d < n; ++d) {
        if ((m >> d) & 1) {
          w = _mm256_mul_pd(w, frac[d]);
          idx = _mm_add_epi32(idx, _mm_set1_epi32(g.strides[d]));
        } else {
          w = _mm256_mul_pd(w, _mm256_sub_pd(ones, frac[d]));
        }
      }
      __m256d v = _mm256_i32gather_pd(values, idx, 8);
      v = _mm256_and_pd(v, _mm256_cmp_pd(w, zeros, _CMP_GT_OQ));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, v));
    }
    acc = _mm256_andnot_pd(_mm256_cmp_pd(acc, acc, _CMP_UNORD_Q), acc);
    acc = _mm256_andnot_pd(dead, acc);
    _mm256_storeu_pd(out + q, acc);
  }

  for (; q < count; ++q) {
    const double* lane_xs[4];
    for (int d = 0; d < n; ++d) lane_xs[d] = xs[d] + q;
    interp_batch_scalar(g, values, lane_xs, out + q, 1);
  }
}

double max_abs_diff_avx2(const double* a, const double* b, int64_t count) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d worst = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    worst = _mm256_max_pd(worst, _mm256_andnot_pd(signmask, d));
  }
  double lanes[4];
  _mm256_storeu_pd(lanes, worst);
  double res = 0.0;
  for (double l : lanes) res = res > l ? res : l;
  for (; i < count; ++i) {
    const double d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    if (d > res) res = d;
  }
  return res;
}

}  // namespace relarb::kernels::detail

#endif  // RELARB_HAVE_AVX2
