#include "partmotion/conditioning/pca.hpp"

#include <cstdio>
#include <set>

#include <Eigen/Eigenvalues>

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::conditioning {

Eigen::VectorXd PcaProjector::project(const Eigen::VectorXd& embedding) const {
  if (embedding.size() != mean.size()) {
    throw Error(ErrorCode::kShapeMismatch, "embedding dimension does not match projector input");
  }
  return components.transpose() * (embedding - mean);
}

Eigen::VectorXd PcaProjector::reconstruct(const Eigen::VectorXd& coefficients) const {
  return mean + components * coefficients;
}

std::string PcaProjector::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const double* p, Eigen::Index n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  mix(mean.data(), mean.size());
  mix(components.data(), components.size());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::to_string(inputDim()) + "x" + std::to_string(outputDim()) + "-" + buf;
}

nlohmann::json PcaProjector::toJson() const {
  nlohmann::json matrix = nlohmann::json::array();
  for (Eigen::Index r = 0; r < components.rows(); ++r) {
    matrix.push_back(std::vector<double>(components.row(r).begin(), components.row(r).end()));
  }
  return {
      {"input_dim", inputDim()},
      {"dim", outputDim()},
      {"encoder", encoderFingerprint},
      {"mean", std::vector<double>(mean.begin(), mean.end())},
      {"matrix", matrix},
      {"explained_variance", std::vector<double>(explainedVariance.begin(), explainedVariance.end())},
  };
}

PcaProjector PcaProjector::fromJson(const nlohmann::json& j) {
  try {
    PcaProjector p;
    const auto e = j.at("input_dim").get<Eigen::Index>();
    const auto d = j.at("dim").get<Eigen::Index>();
    p.encoderFingerprint = j.value("encoder", "");
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto& matrix = j.at("matrix");
    if (static_cast<Eigen::Index>(mean.size()) != e || static_cast<Eigen::Index>(matrix.size()) != e) {
      throw Error(ErrorCode::kFormat, "projector shape does not match input_dim");
    }
    p.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), e);
    p.components.resize(e, d);
    for (Eigen::Index r = 0; r < e; ++r) {
      const auto row = matrix.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != d) {
        throw Error(ErrorCode::kFormat, "projector row has wrong width");
      }
      for (Eigen::Index c = 0; c < d; ++c) {
        p.components(r, c) = row[static_cast<std::size_t>(c)];
      }
    }
    const auto ev = j.value("explained_variance", std::vector<double>(static_cast<std::size_t>(d), 0.0));
    p.explainedVariance = Eigen::Map<const Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(ev.size()));
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kFormat, std::string("projector: ") + ex.what());
  }
}

void PcaProjector::save(const std::filesystem::path& path) const {
  writeTextFile(path, toJson().dump(1) + "\n");
}

PcaProjector PcaProjector::load(const std::filesystem::path& path) {
  try {
    return fromJson(nlohmann::json::parse(readTextFile(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, e.what(), path.string());
  }
}

PcaProjector fitPca(const Eigen::MatrixXd& embeddings, std::size_t dim, std::string encoderFingerprint) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index e = embeddings.cols();
  const auto d = static_cast<Eigen::Index>(dim);
  if (d == 0 || d > e) {
    throw Error(ErrorCode::kConfig, "PCA dimension must be in [1, E]");
  }
  if (n < d) {
    throw Error(ErrorCode::kInsufficientLabels,
                "need at least " + std::to_string(dim) + " distinct labels, got " + std::to_string(n));
  }
  PcaProjector p;
  p.encoderFingerprint = std::move(encoderFingerprint);
  p.mean = embeddings.colwise().mean().transpose();
  const Eigen::MatrixXd centered = embeddings.rowwise() - p.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues ascend; take the last d columns in reverse.
  p.components.resize(e, d);
  p.explainedVariance.resize(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::Index src = e - 1 - c;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) {
      v = -v;
    }
    p.components.col(c) = v;
    p.explainedVariance[c] = std::max(0.0, solver.eigenvalues()[src]);
  }
  return p;
}

PcaProjector fitLabelPca(const std::vector<std::string>& labels, const TextEncoder& encoder, std::size_t dim) {
  std::set<std::string> distinct;
  for (const auto& l : labels) {
    if (!l.empty()) {
      distinct.insert(l);
    }
  }
  if (distinct.size() < dim) {
    throw Error(ErrorCode::kInsufficientLabels, "need at least " + std::to_string(dim) +
                                                    " distinct labels, got " + std::to_string(distinct.size()));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(distinct.size()), static_cast<Eigen::Index>(encoder.dim()));
  Eigen::Index r = 0;
  for (const auto& l : distinct) {
    x.row(r++) = encoder.encode(l).transpose();
  }
  return fitPca(x, dim, encoder.fingerprint());
}

}  // namespace partmotion::conditioning
