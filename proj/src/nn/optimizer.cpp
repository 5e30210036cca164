#include "partmotion/nn/optimizer.hpp"

#include <cmath>

#include "partmotion/common/error.hpp"

namespace partmotion::nn {

AdamW::AdamW(ParamRefs params, AdamWConfig config) : params_(std::move(params)), config_(config) {
  for (const Param* p : params_) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

double AdamW::step(double gradScale, double lrOverride) {
  ++t_;
  double norm2 = 0.0;
  for (const Param* p : params_) {
    norm2 += sumSquares(p->grad);
  }
  const double norm = std::sqrt(norm2) * std::abs(gradScale);
  double scale = gradScale;
  if (config_.clipNorm > 0.0 && norm > config_.clipNorm) {
    scale *= config_.clipNorm / norm;
  }
  const double lr = lrOverride >= 0.0 ? lrOverride : config_.learningRate;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Param& p = *params_[i];
    auto& m = m_[i];
    auto& v = v_[i];
    auto& w = p.value.values();
    const auto& g = p.grad.values();
    const double decay = p.decay ? config_.weightDecay : 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j] * scale;
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * gj;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= lr * (mhat / (std::sqrt(vhat) + config_.eps) + decay * w[j]);
    }
  }
  return norm;
}

std::vector<double> flattenParams(const ParamRefs& params) {
  std::vector<double> flat;
  flat.reserve(parameterCount(params));
  for (const Param* p : params) {
    flat.insert(flat.end(), p->value.values().begin(), p->value.values().end());
  }
  return flat;
}

void unflattenParams(const ParamRefs& params, const std::vector<double>& flat, std::size_t offset) {
  if (flat.size() < offset + parameterCount(params)) {
    throw Error(ErrorCode::kFormat, "parameter payload too short");
  }
  for (Param* p : params) {
    auto& dst = p->value.values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
    offset += dst.size();
  }
}

nlohmann::json paramShapes(const ParamRefs& params) {
  nlohmann::json shapes = nlohmann::json::array();
  for (const Param* p : params) {
    shapes.push_back({p->name, p->value.rows(), p->value.cols()});
  }
  return shapes;
}

}  // namespace partmotion::nn
