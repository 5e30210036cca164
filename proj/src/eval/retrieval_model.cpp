#include "partmotion/eval/retrieval_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "partmotion/common/error.hpp"
#include "partmotion/nn/optimizer.hpp"

namespace partmotion::eval {
namespace {

nn::Mat toMat(const Eigen::MatrixXd& m) {
  nn::Mat out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
    }
  }
  return out;
}

Eigen::MatrixXd toEigen(const nn::Mat& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    }
  }
  return out;
}

// Row-normalizes u in place; returns the norms.
Eigen::VectorXd normalizeRows(Eigen::MatrixXd& u) {
  Eigen::VectorXd norms = u.rowwise().norm();
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    u.row(r) /= std::max(norms[r], 1e-12);
  }
  return norms;
}

// Gradient through y = u / ‖u‖.
Eigen::MatrixXd normalizeBackward(const Eigen::MatrixXd& y, const Eigen::VectorXd& norms, const Eigen::MatrixXd& dy) {
  Eigen::MatrixXd du(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const double proj = y.row(r).dot(dy.row(r));
    du.row(r) = (dy.row(r) - proj * y.row(r)) / std::max(norms[r], 1e-12);
  }
  return du;
}

}  // namespace

nlohmann::json RetrievalConfig::toJson() const {
  return {{"feature_dim", featureDim}, {"text_dim", textDim},     {"hidden", hidden},
          {"embed_dim", embedDim},     {"max_frames", maxFrames}, {"temperature", temperature}};
}

RetrievalConfig RetrievalConfig::fromJson(const nlohmann::json& j) {
  RetrievalConfig c;
  c.featureDim = j.at("feature_dim").get<std::size_t>();
  c.textDim = j.at("text_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.embedDim = j.at("embed_dim").get<std::size_t>();
  c.maxFrames = j.at("max_frames").get<std::size_t>();
  c.temperature = j.at("temperature").get<double>();
  return c;
}

RetrievalModel::RetrievalModel(const RetrievalConfig& config, std::uint64_t seed) : config_(config) {
  if (config.featureDim == 0 || config.textDim == 0 || config.hidden == 0 || config.embedDim == 0 ||
      config.maxFrames == 0 || !(config.temperature > 0.0)) {
    throw Error(ErrorCode::kConfig, "invalid retrieval model config");
  }
  std::mt19937_64 rng(seed);
  frame_ = nn::Mlp("motion.frame", config.featureDim, config.hidden, config.hidden, rng);
  head_ = nn::Linear("motion.head", config.hidden, config.embedDim, rng);
  text_ = nn::Mlp("text", config.textDim, config.hidden, config.embedDim, rng);
}

nn::Mat RetrievalModel::subsample(const nn::Mat& crop) const {
  if (crop.cols() != config_.featureDim || crop.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "motion crop width does not match the retrieval model");
  }
  if (crop.rows() <= config_.maxFrames) {
    return crop;
  }
  nn::Mat out(config_.maxFrames, crop.cols());
  for (std::size_t i = 0; i < config_.maxFrames; ++i) {
    const std::size_t src = i * (crop.rows() - 1) / (config_.maxFrames - 1 == 0 ? 1 : config_.maxFrames - 1);
    std::copy(crop.row(src), crop.row(src) + crop.cols(), out.row(i));
  }
  return out;
}

Eigen::MatrixXd RetrievalModel::embedMotions(const std::vector<const nn::Mat*>& crops) const {
  nn::Mat pooled(crops.size(), config_.hidden);
  for (std::size_t b = 0; b < crops.size(); ++b) {
    nn::MlpCache cache;
    const nn::Mat h = frame_.forward(subsample(*crops[b]), cache);
    double* dst = pooled.row(b);
    for (std::size_t r = 0; r < h.rows(); ++r) {
      for (std::size_t c = 0; c < h.cols(); ++c) {
        dst[c] += h(r, c) / static_cast<double>(h.rows());
      }
    }
  }
  Eigen::MatrixXd u = toEigen(head_.forward(pooled));
  normalizeRows(u);
  return u;
}

Eigen::MatrixXd RetrievalModel::embedTexts(const Eigen::MatrixXd& textEmbeddings) const {
  if (static_cast<std::size_t>(textEmbeddings.cols()) != config_.textDim) {
    throw Error(ErrorCode::kShapeMismatch, "text embedding width does not match the retrieval model");
  }
  nn::MlpCache cache;
  Eigen::MatrixXd u = toEigen(text_.forward(toMat(textEmbeddings), cache));
  normalizeRows(u);
  return u;
}

double RetrievalModel::lossAndGrad(const std::vector<const nn::Mat*>& crops, const Eigen::MatrixXd& textEmbeddings,
                                   const std::vector<std::string>& labels) {
  const std::size_t b = crops.size();
  // Motion tower with caches.
  std::vector<nn::MlpCache> frameCaches(b);
  std::vector<std::size_t> frameCounts(b);
  nn::Mat pooled(b, config_.hidden);
  for (std::size_t i = 0; i < b; ++i) {
    const nn::Mat h = frame_.forward(subsample(*crops[i]), frameCaches[i]);
    frameCounts[i] = h.rows();
    double* dst = pooled.row(i);
    for (std::size_t r = 0; r < h.rows(); ++r) {
      for (std::size_t c = 0; c < h.cols(); ++c) {
        dst[c] += h(r, c) / static_cast<double>(h.rows());
      }
    }
  }
  Eigen::MatrixXd m = toEigen(head_.forward(pooled));
  const Eigen::VectorXd mNorms = normalizeRows(m);

  nn::MlpCache textCache;
  Eigen::MatrixXd t = toEigen(text_.forward(toMat(textEmbeddings), textCache));
  const Eigen::VectorXd tNorms = normalizeRows(t);

  const auto n = static_cast<Eigen::Index>(b);
  const Eigen::MatrixXd logits = m * t.transpose() / config_.temperature;
  auto excluded = [&](Eigen::Index i, Eigen::Index j) {
    return i != j && labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
  };
  Eigen::MatrixXd rowSoft = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd colSoft = Eigen::MatrixXd::Zero(n, n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double rmax = -1e300, cmax = -1e300;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!excluded(i, j)) {
        rmax = std::max(rmax, logits(i, j));
        cmax = std::max(cmax, logits(j, i));
      }
    }
    double rsum = 0.0, csum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!excluded(i, j)) {
        rowSoft(i, j) = std::exp(logits(i, j) - rmax);
        colSoft(j, i) = std::exp(logits(j, i) - cmax);
        rsum += rowSoft(i, j);
        csum += colSoft(j, i);
      }
    }
    rowSoft.row(i) /= rsum;
    colSoft.col(i) /= csum;
    loss -= 0.5 * (std::log(rowSoft(i, i)) + std::log(colSoft(i, i)));
  }
  loss /= static_cast<double>(n);

  Eigen::MatrixXd dLogits = 0.5 * (rowSoft + colSoft);
  dLogits.diagonal().array() -= 1.0;
  dLogits /= static_cast<double>(n);
  const Eigen::MatrixXd dm = dLogits * t / config_.temperature;
  const Eigen::MatrixXd dt = dLogits.transpose() * m / config_.temperature;

  const nn::Mat du = toMat(normalizeBackward(m, mNorms, dm));
  const nn::Mat dPooled = head_.backward(pooled, du);
  for (std::size_t i = 0; i < b; ++i) {
    nn::Mat dFrames(frameCounts[i], config_.hidden);
    for (std::size_t r = 0; r < frameCounts[i]; ++r) {
      for (std::size_t c = 0; c < config_.hidden; ++c) {
        dFrames(r, c) = dPooled(i, c) / static_cast<double>(frameCounts[i]);
      }
    }
    frame_.backwardParamsOnly(dFrames, frameCaches[i]);
  }
  text_.backwardParamsOnly(toMat(normalizeBackward(t, tNorms, dt)), textCache);
  return loss;
}

nn::ParamRefs RetrievalModel::parameters() {
  nn::ParamRefs out;
  frame_.collect(out);
  head_.collect(out);
  text_.collect(out);
  return out;
}

Eigen::MatrixXd encodeLabels(const std::vector<std::string>& labels, const conditioning::TextEncoder& encoder) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(encoder.dim()));
  std::map<std::string, Eigen::VectorXd> cache;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = cache.find(labels[i]);
    if (it == cache.end()) {
      it = cache.emplace(labels[i], encoder.encode(labels[i])).first;
    }
    out.row(static_cast<Eigen::Index>(i)) = it->second.transpose();
  }
  return out;
}

RetrievalModel trainRetrievalModel(const std::vector<RetrievalPair>& pairs, const conditioning::TextEncoder& encoder,
                                   const RetrievalConfig& config, const RetrievalTrainConfig& trainCfg) {
  if (pairs.size() < trainCfg.minPairs) {
    throw Error(ErrorCode::kInsufficientData, "retrieval training needs at least " + std::to_string(trainCfg.minPairs) +
                                                  " pairs, got " + std::to_string(pairs.size()));
  }
  RetrievalModel model(config, trainCfg.seed);
  auto params = model.parameters();
  nn::AdamWConfig opt;
  opt.learningRate = trainCfg.learningRate;
  opt.weightDecay = trainCfg.weightDecay;
  nn::AdamW optimizer(params, opt);

  std::vector<std::string> allLabels;
  allLabels.reserve(pairs.size());
  for (const auto& p : pairs) {
    allLabels.push_back(p.label);
  }
  const Eigen::MatrixXd allText = encodeLabels(allLabels, encoder);

  std::mt19937_64 rng(trainCfg.seed ^ 0x5EED5EEDULL);
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::size_t cursor = order.size();
  const std::size_t batch = std::min(trainCfg.batchSize, pairs.size());
  for (std::size_t step = 0; step < trainCfg.steps; ++step) {
    std::vector<const nn::Mat*> crops;
    std::vector<std::string> labels;
    Eigen::MatrixXd text(static_cast<Eigen::Index>(batch), allText.cols());
    for (std::size_t k = 0; k < batch; ++k) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const std::size_t idx = order[cursor++];
      crops.push_back(&pairs[idx].crop);
      labels.push_back(pairs[idx].label);
      text.row(static_cast<Eigen::Index>(k)) = allText.row(static_cast<Eigen::Index>(idx));
    }
    nn::zeroGrads(params);
    const double loss = model.lossAndGrad(crops, text, labels);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonfiniteLoss, "retrieval training diverged at step " + std::to_string(step));
    }
    optimizer.step();
  }
  return model;
}

}  // namespace partmotion::eval
