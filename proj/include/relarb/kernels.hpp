#pragma once

#include <cstdint>

namespace relarb::kernels {

// Hot inner loops of the grid solver, with scalar reference implementations
// and AVX2 variants selected at runtime. Both are compiled with FP
// contraction off so results are bit-identical across backends.

struct GridDesc {
  int n = 0;  // spatial dims, 1..4; every axis has >= 2 nodes
  double origin[4] = {};
  double inv_delta = 0.0;
  int dims[4] = {};
  int32_t strides[4] = {};  // node counts stay below 2^31
};

enum class Backend { Scalar, Avx2 };

Backend active_backend();
/// Force a backend (tests); returns false if unsupported on this CPU.
bool set_backend(Backend b);
const char* backend_name(Backend b);

/// Multilinear interpolation of `count` query points (structure-of-arrays
/// coordinates xs[0..n-1]) against grid `values`. Outside-domain nodes carry
/// NaN: any NaN corner with positive weight zeroes that sample, as does any
/// out-of-grid query. Weight-zero corners do not participate.
void interp_batch(const GridDesc& g, const double* values, const double* const* xs, double* out,
                  int64_t count);

/// max_i |a_i - b_i|
double max_abs_diff(const double* a, const double* b, int64_t count);

namespace detail {
void interp_batch_scalar(const GridDesc& g, const double* values, const double* const* xs,
                         double* out, int64_t count);
double max_abs_diff_scalar(const double* a, const double* b, int64_t count);
#if defined(RELARB_HAVE_AVX2)
void interp_batch_avx2(const GridDesc& g, const double* values, const double* const* xs,
                       double* out, int64_t count);
double max_abs_diff_avx2(const double* a, const double* b, int64_t count);
#endif
}  // namespace detail

}  // namespace relarb::kernels
