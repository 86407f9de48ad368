#include "bcsmile/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bcsmile::simd {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(BCSMILE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::runtime_error("kernel variant not available: " + std::string(isa_name(isa)));
  }
#ifdef BCSMILE_HAVE_AVX2
  if (isa == Isa::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("BCSMILE_SIMD")) {
    const std::string v = env;
    if (v == "scalar") return detail::scalar_table();
    if (v == "avx2") return kernels_for(Isa::avx2);
  }
  if (isa_available(Isa::avx2)) return kernels_for(Isa::avx2);
  return detail::scalar_table();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

}  // namespace bcsmile::simd
