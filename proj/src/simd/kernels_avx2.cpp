#include "bcsmile/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace bcsmile::simd::detail {
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
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

void gemv_t_avx2(const double* w, std::size_t rows, std::size_t cols, const double* g, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_avx2(g[r], w + r * cols, out, cols);
  }
}

void rank1_avx2(double* w, std::size_t rows, std::size_t cols, const double* g, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_avx2(g[r], x, w + r * cols, cols);
  }
}

// Two points per register; mul + hadd keeps the same rounding as the scalar
// dx*dx + dy*dy, so distances are bit-identical across variants.
void point_dist_avx2(const double* a, const double* b, std::size_t points, double* out) {
  std::size_t p = 0;
  for (; p + 4 <= points; p += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + 2 * p), _mm256_loadu_pd(b + 2 * p));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + 2 * p + 4), _mm256_loadu_pd(b + 2 * p + 4));
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
    const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
    _mm256_storeu_pd(out + p, _mm256_sqrt_pd(ordered));
  }
  for (; p < points; ++p) {
    const double dx = a[2 * p] - b[2 * p];
    const double dy = a[2 * p + 1] - b[2 * p + 1];
    out[p] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2, dot_avx2,   axpy_avx2,      gemv_avx2,
                                 gemv_t_avx2, rank1_avx2, point_dist_avx2};
  return table;
}

}  // namespace bcsmile::simd::detail
