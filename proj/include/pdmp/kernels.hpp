#pragma once
// Dense inner loops used by the flows, rates and quadrature.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is picked once at first use from the CPU
// feature bits; PDMP_SIMD=scalar in the environment forces the reference path.
// Vector reductions use four independent accumulators, so results may differ
// from the scalar path in the last few bits.

#include <cstddef>
#include <span>
#include <string_view>

namespace pdmp::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
  // sum_i w_i * a_i^2
  double (*weighted_sum_sq)(const double* w, const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out_i = a_i * b_i
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  // (x, v) <- (x c + v s, -x s + v c), one angle for all modes
  void (*rotate_uniform)(double* x, double* v, std::size_t n, double c, double s);
  // per-mode angles
  void (*rotate_modes)(double* x, double* v, const double* c, const double* s, std::size_t n);
  // y = A x with A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // x = A^T y with A row-major rows x cols
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in

/// Active table. Selected on first call.
const KernelTable& active();
Backend active_backend();
std::string_view backend_name(Backend b);
bool backend_available(Backend b);
/// Switch the process-wide backend (tests and benchmarks). Throws if unavailable.
void force_backend(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum_sq(std::span<const double> a) { return active().sum_sq(a.data(), a.size()); }
inline double weighted_sum_sq(std::span<const double> w, std::span<const double> a) {
  return active().weighted_sum_sq(w.data(), a.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().hadamard(a.data(), b.data(), out.data(), a.size());
}
inline void rotate_uniform(std::span<double> x, std::span<double> v, double c, double s) {
  active().rotate_uniform(x.data(), v.data(), x.size(), c, s);
}
inline void rotate_modes(std::span<double> x, std::span<double> v, std::span<const double> c,
                         std::span<const double> s) {
  active().rotate_modes(x.data(), v.data(), c.data(), s.data(), x.size());
}

}  // namespace pdmp::kernels
