#include "bcsmile/simd/kernels.hpp"

#include <cmath>

namespace bcsmile::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void gemv_t_scalar(const double* w, std::size_t rows, std::size_t cols, const double* g, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], w + r * cols, out, cols);
  }
}

void rank1_scalar(double* w, std::size_t rows, std::size_t cols, const double* g, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], x, w + r * cols, cols);
  }
}

void point_dist_scalar(const double* a, const double* b, std::size_t points, double* out) {
  for (std::size_t p = 0; p < points; ++p) {
    const double dx = a[2 * p] - b[2 * p];
    const double dy = a[2 * p + 1] - b[2 * p + 1];
    out[p] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, dot_scalar,   axpy_scalar,       gemv_scalar,
                                 gemv_t_scalar, rank1_scalar, point_dist_scalar};
  return table;
}

}  // namespace bcsmile::simd::detail
