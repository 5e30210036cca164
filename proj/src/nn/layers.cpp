#include "partmotion/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "partmotion/common/error.hpp"

namespace partmotion::nn {

void zeroGrads(const ParamRefs& params) {
  for (Param* p : params) {
    p->grad.setZero();
  }
}

std::size_t parameterCount(const ParamRefs& params) {
  std::size_t n = 0;
  for (const Param* p : params) {
    n += p->value.size();
  }
  return n;
}

Linear::Linear(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng,
               double initScale)
    : weight(name + ".weight", in, out), bias(name + ".bias", 1, out, false) {
  std::normal_distribution<double> normal(0.0, initScale / std::sqrt(static_cast<double>(in)));
  for (double& w : weight.value.values()) {
    w = normal(rng);
  }
}

Mat Linear::forward(const Mat& x) const {
  if (x.cols() != inFeatures()) {
    throw Error(ErrorCode::kShapeMismatch,
                weight.name + ": expected " + std::to_string(inFeatures()) + " input columns, got " +
                    std::to_string(x.cols()));
  }
  Mat y(x.rows(), outFeatures());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    std::copy_n(bias.value.data(), y.cols(), y.row(r));
  }
  matmulAcc(x, weight.value, y);
  return y;
}

void Linear::backwardParamsOnly(const Mat& x, const Mat& dy) {
  matmulTransAAcc(x, dy, weight.grad);
  double* db = bias.grad.data();
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    const double* row = dy.row(r);
    for (std::size_t c = 0; c < dy.cols(); ++c) {
      db[c] += row[c];
    }
  }
}

Mat Linear::backward(const Mat& x, const Mat& dy) {
  backwardParamsOnly(x, dy);
  return matmulTransB(dy, weight.value);
}

void Linear::collect(ParamRefs& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

LayerNorm::LayerNorm(const std::string& name, std::size_t width)
    : gamma(name + ".gamma", 1, width, false), beta(name + ".beta", 1, width, false) {
  std::fill(gamma.value.values().begin(), gamma.value.values().end(), 1.0);
}

Mat LayerNorm::forward(const Mat& x, LayerNormCache& cache) const {
  const std::size_t n = x.cols();
  cache.normalized = Mat(x.rows(), n);
  cache.invStd.assign(x.rows(), 0.0);
  Mat y(x.rows(), n);
  const double* g = gamma.value.data();
  const double* b = beta.value.data();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row(r);
    double mean = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      mean += xr[c];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double d = xr[c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    cache.invStd[r] = inv;
    double* nr = cache.normalized.row(r);
    double* yr = y.row(r);
    for (std::size_t c = 0; c < n; ++c) {
      nr[c] = (xr[c] - mean) * inv;
      yr[c] = nr[c] * g[c] + b[c];
    }
  }
  return y;
}

Mat LayerNorm::backward(const Mat& dy, const LayerNormCache& cache) {
  const std::size_t n = dy.cols();
  Mat dx(dy.rows(), n);
  const double* g = gamma.value.data();
  double* dg = gamma.grad.data();
  double* db = beta.grad.data();
  const double invN = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    const double* dyr = dy.row(r);
    const double* nr = cache.normalized.row(r);
    double sumDxhat = 0.0;
    double sumDxhatX = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      dg[c] += dyr[c] * nr[c];
      db[c] += dyr[c];
      const double dxhat = dyr[c] * g[c];
      sumDxhat += dxhat;
      sumDxhatX += dxhat * nr[c];
    }
    double* dxr = dx.row(r);
    const double inv = cache.invStd[r];
    for (std::size_t c = 0; c < n; ++c) {
      const double dxhat = dyr[c] * g[c];
      dxr[c] = inv * (dxhat - invN * sumDxhat - nr[c] * invN * sumDxhatX);
    }
  }
  return dx;
}

void LayerNorm::collect(ParamRefs& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

namespace {
constexpr double kGeluC = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
}  // namespace

Mat gelu(const Mat& x) {
  Mat y(x.rows(), x.cols());
  const auto& xv = x.values();
  auto& yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    yv[i] = 0.5 * v * (1.0 + std::tanh(kSqrt2OverPi * (v + kGeluC * v * v * v)));
  }
  return y;
}

Mat geluBackward(const Mat& x, const Mat& dy) {
  Mat dx(x.rows(), x.cols());
  const auto& xv = x.values();
  const auto& dyv = dy.values();
  auto& dxv = dx.values();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    const double u = kSqrt2OverPi * (v + kGeluC * v * v * v);
    const double t = std::tanh(u);
    const double du = kSqrt2OverPi * (1.0 + 3.0 * kGeluC * v * v);
    dxv[i] = dyv[i] * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * du);
  }
  return dx;
}

Mat dropout(const Mat& x, double rate, std::mt19937_64& rng, Mat& mask) {
  mask = Mat(x.rows(), x.cols(), 1.0);
  if (rate <= 0.0) {
    return x;
  }
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  Mat y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = keep(rng) ? scale : 0.0;
    mask.values()[i] = m;
    y.values()[i] = x.values()[i] * m;
  }
  return y;
}

Mat dropoutBackward(const Mat& dy, const Mat& mask) {
  Mat dx(dy.rows(), dy.cols());
  for (std::size_t i = 0; i < dy.size(); ++i) {
    dx.values()[i] = dy.values()[i] * mask.values()[i];
  }
  return dx;
}

void softmaxRows(Mat& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double* row = m.row(r);
    const double mx = *std::max_element(row, row + m.cols());
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    const double inv = 1.0 / sum;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row[c] *= inv;
    }
  }
}

Mlp::Mlp(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out,
         std::mt19937_64& rng)
    : first(name + ".0", in, hidden, rng), second(name + ".1", hidden, out, rng) {}

Mat Mlp::forward(const Mat& x, MlpCache& cache) const {
  cache.input = x;
  cache.hidden = first.forward(x);
  cache.activated = gelu(cache.hidden);
  return second.forward(cache.activated);
}

Mat Mlp::backward(const Mat& dy, const MlpCache& cache) {
  const Mat dAct = second.backward(cache.activated, dy);
  const Mat dHidden = geluBackward(cache.hidden, dAct);
  return first.backward(cache.input, dHidden);
}

void Mlp::backwardParamsOnly(const Mat& dy, const MlpCache& cache) {
  const Mat dAct = second.backward(cache.activated, dy);
  const Mat dHidden = geluBackward(cache.hidden, dAct);
  first.backwardParamsOnly(cache.input, dHidden);
}

void Mlp::collect(ParamRefs& out) {
  first.collect(out);
  second.collect(out);
}

}  // namespace partmotion::nn
