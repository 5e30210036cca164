#include "partmotion/simd/kernels.hpp"

namespace partmotion::simd {
namespace {

double dotScalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i] * y[i];
  }
  return s;
}

void axpyScalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

void gemmScalar(std::size_t m, std::size_t n, std::size_t k,
                const double* a, std::size_t lda,
                const double* b, std::size_t ldb,
                double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * lda + p];
      const double* bp = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) {
        ci[j] += aip * bp[j];
      }
    }
  }
}

}  // namespace

const KernelTable& scalarKernels() {
  static const KernelTable table{Isa::kScalar, &dotScalar, &axpyScalar, &gemmScalar};
  return table;
}

}  // namespace partmotion::simd
