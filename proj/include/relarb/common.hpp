#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace relarb {

inline constexpr const char* kVersion = "0.1.0";

using Vec = std::vector<double>;

/// Input or parameter rejected before any computation ran (CLI exit code 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative procedure hit its cap without meeting its tolerance (exit code 3).
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual_, Vec history_ = {})
      : std::runtime_error(what), residual(residual_), history(std::move(history_)) {}
  double residual;
  Vec history;
};

/// Request exceeds a configured size cap (exit code 4).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal dense row-major matrix; everything in this project is tiny (dim <= 16).
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Vec col(int j) const {
    Vec v(rows);
    for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
    return v;
  }
};

inline Mat mat_mul(const Mat& x, const Mat& y) {
  Mat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

inline Mat mat_transpose(const Mat& x) {
  Mat z(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) z(j, i) = x(i, j);
  return z;
}

inline Vec mat_vec(const Mat& x, const Vec& v) {
  Vec y(x.rows, 0.0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) y[i] += x(i, j) * v[j];
  return y;
}

inline Vec mat_tvec(const Mat& x, const Vec& v) {
  Vec y(x.cols, 0.0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) y[j] += x(i, j) * v[i];
  return y;
}

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(const Vec& x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

/// Deterministic stream of uniforms and normals. mt19937_64 has a pinned
/// sequence, and Box-Muller keeps the normal mapping library-independent.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  uint64_t next_u64() { return gen_(); }
  int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<uint64_t>(n)); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive an independent sub-stream seed, e.g. per path or per grid node.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  return splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dULL) + salt);
}

}  // namespace relarb
