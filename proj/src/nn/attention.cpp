#include "partmotion/nn/attention.hpp"

#include <cmath>

#include "partmotion/common/error.hpp"

namespace partmotion::nn {

MultiHeadAttention::MultiHeadAttention(const std::string& name, std::size_t width, std::size_t heads,
                                       std::mt19937_64& rng)
    : heads_(heads),
      query_(name + ".q", width, width, rng),
      key_(name + ".k", width, width, rng),
      value_(name + ".v", width, width, rng),
      output_(name + ".o", width, width, rng) {
  if (heads == 0 || width % heads != 0) {
    throw Error(ErrorCode::kConfig, name + ": width must be divisible by head count");
  }
}

Mat MultiHeadAttention::forward(const Mat& x, AttentionCache& cache) const {
  const std::size_t width = x.cols();
  const std::size_t dh = width / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  cache.input = x;
  cache.q = query_.forward(x);
  cache.k = key_.forward(x);
  cache.v = value_.forward(x);
  cache.probs.assign(heads_, Mat());
  cache.context = Mat(x.rows(), width);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Mat qh = sliceColumns(cache.q, h * dh, dh);
    const Mat kh = sliceColumns(cache.k, h * dh, dh);
    const Mat vh = sliceColumns(cache.v, h * dh, dh);
    Mat scores = matmulTransB(qh, kh);
    for (double& s : scores.values()) {
      s *= scale;
    }
    softmaxRows(scores);
    setColumns(cache.context, h * dh, matmul(scores, vh));
    cache.probs[h] = std::move(scores);
  }
  return output_.forward(cache.context);
}

Mat MultiHeadAttention::backward(const Mat& dy, const AttentionCache& cache) {
  const std::size_t width = cache.input.cols();
  const std::size_t dh = width / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Mat dContext = output_.backward(cache.context, dy);
  Mat dq(cache.q.rows(), width), dk(cache.k.rows(), width), dv(cache.v.rows(), width);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Mat& p = cache.probs[h];
    const Mat qh = sliceColumns(cache.q, h * dh, dh);
    const Mat kh = sliceColumns(cache.k, h * dh, dh);
    const Mat vh = sliceColumns(cache.v, h * dh, dh);
    const Mat dCh = sliceColumns(dContext, h * dh, dh);
    setColumns(dv, h * dh, matmulTransA(p, dCh));
    Mat dScores = matmulTransB(dCh, vh);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      const double* pr = p.row(r);
      double* dr = dScores.row(r);
      double dotPd = 0.0;
      for (std::size_t c = 0; c < p.cols(); ++c) {
        dotPd += pr[c] * dr[c];
      }
      for (std::size_t c = 0; c < p.cols(); ++c) {
        dr[c] = pr[c] * (dr[c] - dotPd) * scale;
      }
    }
    setColumns(dq, h * dh, matmul(dScores, kh));
    setColumns(dk, h * dh, matmulTransA(dScores, qh));
  }
  Mat dx = query_.backward(cache.input, dq);
  addScaled(dx, key_.backward(cache.input, dk));
  addScaled(dx, value_.backward(cache.input, dv));
  return dx;
}

void MultiHeadAttention::collect(ParamRefs& out) {
  query_.collect(out);
  key_.collect(out);
  value_.collect(out);
  output_.collect(out);
}

TransformerBlock::TransformerBlock(const std::string& name, std::size_t width, std::size_t heads,
                                   std::size_t ffMultiplier, double dropout, std::mt19937_64& rng)
    : dropout_(dropout),
      norm1_(name + ".ln1", width),
      norm2_(name + ".ln2", width),
      attention_(name + ".attn", width, heads, rng),
      ff1_(name + ".ff1", width, width * ffMultiplier, rng),
      ff2_(name + ".ff2", width * ffMultiplier, width, rng) {}

Mat TransformerBlock::forward(const Mat& x, TransformerBlockCache& cache, std::mt19937_64* rng) const {
  const double rate = rng != nullptr ? dropout_ : 0.0;
  cache.normed1 = norm1_.forward(x, cache.norm1);
  Mat attn = attention_.forward(cache.normed1, cache.attention);
  if (rate > 0.0) {
    attn = dropout(attn, rate, *rng, cache.attnDropMask);
  } else {
    cache.attnDropMask = Mat();
  }
  Mat y = x;
  addScaled(y, attn);
  cache.normed2 = norm2_.forward(y, cache.norm2);
  cache.ffHidden = ff1_.forward(cache.normed2);
  cache.ffActivated = gelu(cache.ffHidden);
  Mat ff = ff2_.forward(cache.ffActivated);
  if (rate > 0.0) {
    ff = dropout(ff, rate, *rng, cache.ffDropMask);
  } else {
    cache.ffDropMask = Mat();
  }
  addScaled(y, ff);
  return y;
}

Mat TransformerBlock::backward(const Mat& dy, const TransformerBlockCache& cache) {
  // dy flows to both the residual and the feed-forward branch.
  Mat dff = cache.ffDropMask.empty() ? dy : dropoutBackward(dy, cache.ffDropMask);
  const Mat dAct = ff2_.backward(cache.ffActivated, dff);
  const Mat dHidden = geluBackward(cache.ffHidden, dAct);
  const Mat dNormed2 = ff1_.backward(cache.normed2, dHidden);
  Mat dMid = dy;
  addScaled(dMid, norm2_.backward(dNormed2, cache.norm2));

  Mat dattn = cache.attnDropMask.empty() ? dMid : dropoutBackward(dMid, cache.attnDropMask);
  const Mat dNormed1 = attention_.backward(dattn, cache.attention);
  Mat dx = dMid;
  addScaled(dx, norm1_.backward(dNormed1, cache.norm1));
  return dx;
}

void TransformerBlock::collect(ParamRefs& out) {
  norm1_.collect(out);
  attention_.collect(out);
  norm2_.collect(out);
  ff1_.collect(out);
  ff2_.collect(out);
}

}  // namespace partmotion::nn
