#include "partmotion/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "partmotion/common/error.hpp"
#include "partmotion/simd/kernels.hpp"

namespace partmotion::nn {
namespace {

void requireShape(bool ok, const char* what) {
  if (!ok) {
    throw Error(ErrorCode::kShapeMismatch, what);
  }
}

}  // namespace

void Mat::setZero() {
  std::fill(data_.begin(), data_.end(), 0.0);
}

void matmulAcc(const Mat& a, const Mat& b, Mat& c) {
  requireShape(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols(), "matmul");
  if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) {
    return;
  }
  simd::kernels().gemm(a.rows(), b.cols(), a.cols(), a.data(), a.cols(), b.data(), b.cols(), c.data(),
                       c.cols());
}

void matmulTransBAcc(const Mat& a, const Mat& b, Mat& c) {
  requireShape(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows(), "matmulTransB");
  const Mat bt = transpose(b);
  matmulAcc(a, bt, c);
}

void matmulTransAAcc(const Mat& a, const Mat& b, Mat& c) {
  requireShape(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols(), "matmulTransA");
  const Mat at = transpose(a);
  matmulAcc(at, b, c);
}

Mat matmul(const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.cols());
  matmulAcc(a, b, c);
  return c;
}

Mat matmulTransB(const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.rows());
  matmulTransBAcc(a, b, c);
  return c;
}

Mat matmulTransA(const Mat& a, const Mat& b) {
  Mat c(a.cols(), b.cols());
  matmulTransAAcc(a, b, c);
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  constexpr std::size_t kBlock = 32;
  for (std::size_t i0 = 0; i0 < a.rows(); i0 += kBlock) {
    const std::size_t i1 = std::min(a.rows(), i0 + kBlock);
    for (std::size_t j0 = 0; j0 < a.cols(); j0 += kBlock) {
      const std::size_t j1 = std::min(a.cols(), j0 + kBlock);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = j0; j < j1; ++j) {
          t(j, i) = a(i, j);
        }
      }
    }
  }
  return t;
}

void addScaled(Mat& y, const Mat& x, double alpha) {
  requireShape(y.sameShape(x), "addScaled");
  simd::kernels().axpy(alpha, x.data(), y.data(), y.size());
}

void setColumns(Mat& dst, std::size_t col0, const Mat& src) {
  requireShape(dst.rows() == src.rows() && col0 + src.cols() <= dst.cols(), "setColumns");
  for (std::size_t r = 0; r < src.rows(); ++r) {
    std::copy_n(src.row(r), src.cols(), dst.row(r) + col0);
  }
}

Mat sliceColumns(const Mat& src, std::size_t col0, std::size_t count) {
  requireShape(col0 + count <= src.cols(), "sliceColumns");
  Mat out(src.rows(), count);
  for (std::size_t r = 0; r < src.rows(); ++r) {
    std::copy_n(src.row(r) + col0, count, out.row(r));
  }
  return out;
}

Mat sliceRows(const Mat& src, std::size_t row0, std::size_t count) {
  requireShape(row0 + count <= src.rows(), "sliceRows");
  Mat out(count, src.cols());
  std::copy_n(src.row(row0), count * src.cols(), out.data());
  return out;
}

Mat hconcat(const std::vector<const Mat*>& parts) {
  if (parts.empty()) {
    return {};
  }
  std::size_t cols = 0;
  for (const Mat* p : parts) {
    requireShape(p->rows() == parts.front()->rows(), "hconcat");
    cols += p->cols();
  }
  Mat out(parts.front()->rows(), cols);
  std::size_t c0 = 0;
  for (const Mat* p : parts) {
    setColumns(out, c0, *p);
    c0 += p->cols();
  }
  return out;
}

Mat vconcat(const std::vector<const Mat*>& parts) {
  if (parts.empty()) {
    return {};
  }
  std::size_t rows = 0;
  for (const Mat* p : parts) {
    requireShape(p->cols() == parts.front()->cols(), "vconcat");
    rows += p->rows();
  }
  Mat out(rows, parts.front()->cols());
  double* dst = out.data();
  for (const Mat* p : parts) {
    dst = std::copy_n(p->data(), p->size(), dst);
  }
  return out;
}

double sumSquares(const Mat& a) {
  return simd::kernels().dot(a.data(), a.data(), a.size());
}

bool allFinite(const Mat& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace partmotion::nn
