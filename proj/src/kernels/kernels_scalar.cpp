#include "pdmp/kernels.hpp"

namespace pdmp::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double weighted_sum_sq_scalar(const double* w, const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void rotate_uniform_scalar(double* x, double* v, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double vi = v[i];
    x[i] = xi * c + vi * s;
    v[i] = -xi * s + vi * c;
  }
}

void rotate_modes_scalar(double* x, double* v, const double* c, const double* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double vi = v[i];
    x[i] = xi * c[i] + vi * s[i];
    v[i] = -xi * s[i] + vi * c[i];
  }
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x) {
  for (std::size_t c = 0; c < cols; ++c) x[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(y[r], a + r * cols, x, cols);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      dot_scalar,          sum_sq_scalar,         weighted_sum_sq_scalar, axpy_scalar, hadamard_scalar,
      rotate_uniform_scalar, rotate_modes_scalar, gemv_scalar,            gemv_t_scalar,
  };
  return table;
}

}  // namespace pdmp::kernels
