#pragma once

#include <random>
#include <string>
#include <vector>

#include "partmotion/nn/tensor.hpp"

namespace partmotion::nn {

struct Param {
  std::string name;
  Mat value;
  Mat grad;
  bool decay = true;  // subject to decoupled weight decay

  Param() = default;
  Param(std::string n, std::size_t rows, std::size_t cols, bool decayed = true)
      : name(std::move(n)), value(rows, cols), grad(rows, cols), decay(decayed) {}
};

using ParamRefs = std::vector<Param*>;

void zeroGrads(const ParamRefs& params);
std::size_t parameterCount(const ParamRefs& params);

// y = x W + b, W stored in x out.
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng,
         double initScale = 1.0);

  std::size_t inFeatures() const {
    return weight.value.rows();
  }
  std::size_t outFeatures() const {
    return weight.value.cols();
  }

  Mat forward(const Mat& x) const;
  // Accumulates weight/bias gradients and returns dL/dx.
  Mat backward(const Mat& x, const Mat& dy);
  // Same as backward but skips the input gradient (for layers fed by data).
  void backwardParamsOnly(const Mat& x, const Mat& dy);

  void collect(ParamRefs& out);

  Param weight;
  Param bias;
};

struct LayerNormCache {
  Mat normalized;
  std::vector<double> invStd;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(const std::string& name, std::size_t width);

  Mat forward(const Mat& x, LayerNormCache& cache) const;
  Mat backward(const Mat& dy, const LayerNormCache& cache);
  void collect(ParamRefs& out);

  Param gamma;
  Param beta;
  double eps = 1e-5;
};

// tanh approximation of GELU
Mat gelu(const Mat& x);
Mat geluBackward(const Mat& x, const Mat& dy);

// Inverted dropout; mask stores the per-element multiplier (0 or 1/(1-rate)).
Mat dropout(const Mat& x, double rate, std::mt19937_64& rng, Mat& mask);
Mat dropoutBackward(const Mat& dy, const Mat& mask);

// Row-wise softmax in place.
void softmaxRows(Mat& m);

// Two-layer perceptron: Linear -> GELU -> Linear.
struct MlpCache {
  Mat input;
  Mat hidden;
  Mat activated;
};

class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out,
      std::mt19937_64& rng);

  Mat forward(const Mat& x, MlpCache& cache) const;
  Mat backward(const Mat& dy, const MlpCache& cache);
  void backwardParamsOnly(const Mat& dy, const MlpCache& cache);
  void collect(ParamRefs& out);

  Linear first;
  Linear second;
};

}  // namespace partmotion::nn
