// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a CPU check.
#include <immintrin.h>

#include "pdmp/kernels.hpp"

namespace pdmp::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

double weighted_sum_sq_avx2(const double* w, const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), av), av, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += w[i] * a[i] * a[i];
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d al = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(al, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void rotate_uniform_avx2(double* x, double* v, std::size_t n, double c, double s) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d vi = _mm256_loadu_pd(v + i);
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(xi, cv, _mm256_mul_pd(vi, sv)));
    _mm256_storeu_pd(v + i, _mm256_fmsub_pd(vi, cv, _mm256_mul_pd(xi, sv)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double vi = v[i];
    x[i] = xi * c + vi * s;
    v[i] = -xi * s + vi * c;
  }
}

void rotate_modes_avx2(double* x, double* v, const double* c, const double* s, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d vi = _mm256_loadu_pd(v + i);
    const __m256d cv = _mm256_loadu_pd(c + i);
    const __m256d sv = _mm256_loadu_pd(s + i);
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(xi, cv, _mm256_mul_pd(vi, sv)));
    _mm256_storeu_pd(v + i, _mm256_fmsub_pd(vi, cv, _mm256_mul_pd(xi, sv)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double vi = v[i];
    x[i] = xi * c[i] + vi * s[i];
    v[i] = -xi * s[i] + vi * c[i];
  }
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

void gemv_t_avx2(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x) {
  for (std::size_t c = 0; c < cols; ++c) x[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(y[r], a + r * cols, x, cols);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      dot_avx2,          sum_sq_avx2,         weighted_sum_sq_avx2, axpy_avx2,     hadamard_avx2,
      rotate_uniform_avx2, rotate_modes_avx2, gemv_avx2,            gemv_t_avx2,
  };
  return &table;
}

}  // namespace pdmp::kernels
