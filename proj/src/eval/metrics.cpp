#include "partmotion/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "partmotion/common/error.hpp"

namespace partmotion::eval {

FilterOracle::FilterOracle(const conditioning::TextEncoder& embedder, double threshold)
    : embedder_(embedder), threshold_(threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kConfig, "filter threshold must be in (0, 1)");
  }
}

const Eigen::VectorXd& FilterOracle::embed(const std::string& text) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(text);
  if (it == cache_.end()) {
    Eigen::VectorXd v = embedder_.encode(text);
    const double n = v.norm();
    if (n > 0.0) {
      v /= n;
    }
    it = cache_.emplace(text, std::move(v)).first;
  }
  return it->second;
}

bool FilterOracle::paraphrase(const std::string& a, const std::string& b) const {
  if (a == b) {
    return true;
  }
  return embed(a).dot(embed(b)) >= threshold_;
}

std::vector<double> recallAtK(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text,
                              const std::vector<std::string>& labels, const std::vector<int>& ks,
                              const FilterOracle* filter) {
  const Eigen::Index n = motion.rows();
  if (text.rows() != n || static_cast<Eigen::Index>(labels.size()) != n || motion.cols() != text.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "retrieval batch shapes disagree");
  }
  std::vector<double> hits(ks.size(), 0.0);
  if (n == 0) {
    return hits;
  }
  const Eigen::MatrixXd sim = motion * text.transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      order[static_cast<std::size_t>(j)] = j;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return sim(i, a) > sim(i, b); });
    // Rank of the first correct candidate.
    std::size_t firstCorrect = order.size();
    for (std::size_t r = 0; r < order.size(); ++r) {
      const Eigen::Index j = order[r];
      const bool correct = j == i || (filter != nullptr && filter->paraphrase(labels[static_cast<std::size_t>(i)],
                                                                            labels[static_cast<std::size_t>(j)]));
      if (correct) {
        firstCorrect = r;
        break;
      }
    }
    for (std::size_t q = 0; q < ks.size(); ++q) {
      if (firstCorrect < static_cast<std::size_t>(ks[q])) {
        hits[q] += 1.0;
      }
    }
  }
  for (double& h : hits) {
    h = 100.0 * h / static_cast<double>(n);
  }
  return hits;
}

double motionToText(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text) {
  if (motion.rows() != text.rows() || motion.cols() != text.cols() || motion.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "M2T needs equally shaped, nonempty batches");
  }
  return (motion.cwiseProduct(text)).rowwise().sum().mean();
}

GaussianStats gaussianStats(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) {
    throw Error(ErrorCode::kInsufficientData, "no embeddings for Gaussian statistics");
  }
  GaussianStats s;
  s.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - s.mean.transpose();
  s.covariance = centered.transpose() * centered / static_cast<double>(rows.rows());
  return s;
}

namespace {

// Symmetric PSD square root; throws on eigenvalues below -1e-6.
Eigen::MatrixXd psdSqrt(const Eigen::MatrixXd& m, const char* what) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  Eigen::VectorXd ev = solver.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -1e-6) {
    throw Error(ErrorCode::kNonpsdCovariance, std::string(what) + " has a negative eigenvalue",
                std::to_string(ev.minCoeff()));
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

double fidFromStats(const GaussianStats& a, const GaussianStats& b) {
  if (a.mean.size() != b.mean.size() || a.covariance.rows() != b.covariance.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "FID statistics have different dimensions");
  }
  const Eigen::MatrixXd rootA = psdSqrt(a.covariance, "covariance A");
  psdSqrt(b.covariance, "covariance B");
  // Tr((ΣA ΣB)^{1/2}) = Tr((√ΣA ΣB √ΣA)^{1/2}), the latter being symmetric PSD.
  const Eigen::MatrixXd inner = rootA * b.covariance * rootA;
  const double traceCross = psdSqrt(inner, "covariance product").trace();
  const double meanTerm = (a.mean - b.mean).squaredNorm();
  const double value = meanTerm + a.covariance.trace() + b.covariance.trace() - 2.0 * traceCross;
  return std::max(0.0, value);
}

double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return fidFromStats(gaussianStats(a), gaussianStats(b));
}

double diversity(const Eigen::MatrixXd& embeddings, std::size_t pairs, std::uint64_t seed) {
  const Eigen::Index n = embeddings.rows();
  if (n < 2 || pairs == 0) {
    throw Error(ErrorCode::kInsufficientData, "diversity needs at least two embeddings and one pair");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  std::uniform_int_distribution<Eigen::Index> second(0, n - 2);
  double total = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    const Eigen::Index i = first(rng);
    Eigen::Index j = second(rng);
    if (j >= i) {
      ++j;
    }
    total += (embeddings.row(i) - embeddings.row(j)).norm();
  }
  return total / static_cast<double>(pairs);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) {
    return s;
  }
  const double n = static_cast<double>(values.size());
  for (double v : values) {
    s.mean += v;
  }
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - s.mean) * (v - s.mean);
    }
    s.halfWidth = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

}  // namespace partmotion::eval
