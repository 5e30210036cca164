#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace partmotion::nn {

// Row-major dense float64 matrix.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept {
    return rows_;
  }
  std::size_t cols() const noexcept {
    return cols_;
  }
  std::size_t size() const noexcept {
    return data_.size();
  }
  bool empty() const noexcept {
    return data_.empty();
  }

  double* data() noexcept {
    return data_.data();
  }
  const double* data() const noexcept {
    return data_.data();
  }
  double* row(std::size_t r) noexcept {
    return data_.data() + r * cols_;
  }
  const double* row(std::size_t r) const noexcept {
    return data_.data() + r * cols_;
  }
  std::span<double> rowSpan(std::size_t r) noexcept {
    return {row(r), cols_};
  }
  std::span<const double> rowSpan(std::size_t r) const noexcept {
    return {row(r), cols_};
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::vector<double>& values() noexcept {
    return data_;
  }
  const std::vector<double>& values() const noexcept {
    return data_;
  }

  void setZero();
  bool sameShape(const Mat& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// C += A * B
void matmulAcc(const Mat& a, const Mat& b, Mat& c);
// C += A * B^T
void matmulTransBAcc(const Mat& a, const Mat& b, Mat& c);
// C += A^T * B
void matmulTransAAcc(const Mat& a, const Mat& b, Mat& c);

Mat matmul(const Mat& a, const Mat& b);
Mat matmulTransB(const Mat& a, const Mat& b);
Mat matmulTransA(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

// y += alpha * x (same shape)
void addScaled(Mat& y, const Mat& x, double alpha = 1.0);
// Copies columns [col0, col0 + src.cols()) of dst from src.
void setColumns(Mat& dst, std::size_t col0, const Mat& src);
Mat sliceColumns(const Mat& src, std::size_t col0, std::size_t count);
Mat sliceRows(const Mat& src, std::size_t row0, std::size_t count);
Mat hconcat(const std::vector<const Mat*>& parts);
Mat vconcat(const std::vector<const Mat*>& parts);

double sumSquares(const Mat& a);
bool allFinite(const Mat& a);

}  // namespace partmotion::nn
