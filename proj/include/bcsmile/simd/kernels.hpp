#pragma once

// Dense double-precision inner loops used by the recurrent model, the pitch
// tracker and the pose metrics. Every kernel has a portable scalar reference
// and, where the build and CPU allow it, an AVX2/FMA variant. The variant is
// chosen once per process; BCSMILE_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace bcsmile::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += W x, W row-major rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
  // out += W^T g
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* g, double* out);
  // W += g x^T
  void (*rank1)(double* w, std::size_t rows, std::size_t cols, const double* g, const double* x);
  // out[p] = |a_p - b_p| for interleaved (x, y) points
  void (*point_dist)(const double* a, const double* b, std::size_t points, double* out);
};

bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

// Table for a specific ISA; throws if it is not available on this build/CPU.
const KernelTable& kernels_for(Isa isa);

// Process-wide selection (best available unless overridden by BCSMILE_SIMD).
const KernelTable& kernels();

namespace detail {
const KernelTable& scalar_table();
#ifdef BCSMILE_HAVE_AVX2
const KernelTable& avx2_table();
#endif
}  // namespace detail

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace bcsmile::simd
