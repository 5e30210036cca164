#pragma once

#include <random>
#include <string>
#include <vector>

#include "partmotion/nn/layers.hpp"

namespace partmotion::nn {

struct AttentionCache {
  Mat input;
  Mat q, k, v;
  std::vector<Mat> probs;  // one T x T matrix per head
  Mat context;
};

// Full (unmasked) multi-head self-attention.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(const std::string& name, std::size_t width, std::size_t heads,
                     std::mt19937_64& rng);

  Mat forward(const Mat& x, AttentionCache& cache) const;
  Mat backward(const Mat& dy, const AttentionCache& cache);
  void collect(ParamRefs& out);

  std::size_t heads() const {
    return heads_;
  }

 private:
  std::size_t heads_ = 1;
  Linear query_, key_, value_, output_;
};

struct TransformerBlockCache {
  LayerNormCache norm1, norm2;
  Mat normed1, normed2;
  AttentionCache attention;
  Mat attnDropMask, ffDropMask;
  Mat ffHidden, ffActivated;
};

// Pre-norm encoder block: x + Attn(LN(x)), then + FFN(LN(.)).
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(const std::string& name, std::size_t width, std::size_t heads,
                   std::size_t ffMultiplier, double dropout, std::mt19937_64& rng);

  // rng may be null for inference (dropout disabled).
  Mat forward(const Mat& x, TransformerBlockCache& cache, std::mt19937_64* rng) const;
  Mat backward(const Mat& dy, const TransformerBlockCache& cache);
  void collect(ParamRefs& out);

 private:
  double dropout_ = 0.0;
  LayerNorm norm1_, norm2_;
  MultiHeadAttention attention_;
  Linear ff1_, ff2_;
};

}  // namespace partmotion::nn
