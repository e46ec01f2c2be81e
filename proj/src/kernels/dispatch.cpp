#include <cstdlib>
#include <cstring>

#include "relarb/kernels.hpp"

namespace relarb::kernels {

namespace {

bool avx2_supported() {
#if defined(RELARB_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("RELARB_BACKEND"); env && std::strcmp(env, "scalar") == 0)
    return Backend::Scalar;
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

Backend g_backend = initial_backend();

}  // namespace

Backend active_backend() { return g_backend; }

bool set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported()) return false;
  g_backend = b;
  return true;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void interp_batch(const GridDesc& g, const double* values, const double* const* xs, double* out,
                  int64_t count) {
#if defined(RELARB_HAVE_AVX2)
  if (g_backend == Backend::Avx2) {
    detail::interp_batch_avx2(g, values, xs, out, count);
    return;
  }
#endif
  detail::interp_batch_scalar(g, values, xs, out, count);
}

double max_abs_diff(const double* a, const double* b, int64_t count) {
#if defined(RELARB_HAVE_AVX2)
  if (g_backend == Backend::Avx2) return detail::max_abs_diff_avx2(a, b, count);
#endif
  return detail::max_abs_diff_scalar(a, b, count);
}

}  // namespace relarb::kernels
