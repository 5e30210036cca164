#pragma once

#include <cstddef>
#include <string_view>

// Dense float64 kernels behind the neural-network layers. Each kernel has a
// scalar reference implementation and, where the CPU supports it, an AVX2+FMA
// variant. The active table is chosen once at startup; set the environment
// variable PARTMOTION_SIMD=scalar to force the reference path.

namespace partmotion::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C(m x n) += A(m x k) * B(k x n), all row-major with leading dimensions.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k,
               const double* a, std::size_t lda,
               const double* b, std::size_t ldb,
               double* c, std::size_t ldc);
};

const KernelTable& scalarKernels();
// nullptr when the variant was not compiled in.
const KernelTable* avx2Kernels();

bool cpuSupportsAvx2();

// The table selected for this process.
const KernelTable& kernels();

std::string_view isaName(Isa isa);

}  // namespace partmotion::simd
