#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "partmotion/simd/kernels.hpp"

using namespace partmotion::simd;

namespace {

std::vector<double> randomVector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar kernels match naive loops") {
    const auto& k = scalarKernels();
    std::mt19937_64 rng(1);
    const auto x = randomVector(37, rng), y = randomVector(37, rng);
    double ref = 0.0;
    for (std::size_t i = 0; i < 37; ++i) ref += x[i] * y[i];
    CHECK(k.dot(x.data(), y.data(), 37) == doctest::Approx(ref).epsilon(1e-14));
  }

  TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const KernelTable* fast = avx2Kernels();
    if (fast == nullptr || !cpuSupportsAvx2()) {
      MESSAGE("AVX2 variant unavailable on this machine; skipping");
      return;
    }
    const auto& ref = scalarKernels();
    std::mt19937_64 rng(2);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 64u, 129u}) {
      const auto x = randomVector(n, rng), y = randomVector(n, rng);
      CHECK(fast->dot(x.data(), y.data(), n) == doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-12));
      auto y1 = y, y2 = y;
      ref.axpy(0.37, x.data(), y1.data(), n);
      fast->axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-13));
    }
    struct Shape {
      std::size_t m, n, k;
    };
    for (const Shape s : {Shape{1, 1, 1}, Shape{3, 5, 7}, Shape{8, 8, 8}, Shape{17, 33, 9}, Shape{64, 13, 70}}) {
      // Padded leading dimensions exercise the strided paths.
      const std::size_t lda = s.k + 2, ldb = s.n + 1, ldc = s.n + 3;
      const auto a = randomVector(s.m * lda, rng), b = randomVector(s.k * ldb, rng);
      auto c1 = randomVector(s.m * ldc, rng);
      auto c2 = c1;
      ref.gemm(s.m, s.n, s.k, a.data(), lda, b.data(), ldb, c1.data(), ldc);
      fast->gemm(s.m, s.n, s.k, a.data(), lda, b.data(), ldb, c2.data(), ldc);
      for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c2[i] == doctest::Approx(c1[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("active table is one of the variants") {
    const auto& k = kernels();
    CHECK((k.isa == Isa::kScalar || k.isa == Isa::kAvx2));
    CHECK(!isaName(k.isa).empty());
  }
}
