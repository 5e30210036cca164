#include "partmotion/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace partmotion::simd {

#ifndef PARTMOTION_HAVE_AVX2
const KernelTable* avx2Kernels() {
  return nullptr;
}
#endif

bool cpuSupportsAvx2() {
#if defined(PARTMOTION_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& kernels() {
  static const KernelTable& selected = []() -> const KernelTable& {
    const char* forced = std::getenv("PARTMOTION_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") {
      return scalarKernels();
    }
    if (cpuSupportsAvx2() && avx2Kernels() != nullptr) {
      return *avx2Kernels();
    }
    return scalarKernels();
  }();
  return selected;
}

std::string_view isaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "?";
}

}  // namespace partmotion::simd
