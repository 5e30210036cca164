#include "partmotion/conditioning/text_encoder.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "partmotion/annotation/stats.hpp"
#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

namespace partmotion::conditioning {
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniformOpen(std::uint64_t& state) {
  return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

ToyHashEncoder::ToyHashEncoder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim == 0) {
    throw Error(ErrorCode::kConfig, "toy-hash encoder dimension must be positive");
  }
}

Eigen::VectorXd ToyHashEncoder::hashedGaussian(std::string_view key) const {
  std::uint64_t state = fnv1a(key, seed_);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim_));
  // Box-Muller from a splitmix stream; portable across standard libraries.
  for (std::size_t i = 0; i < dim_; i += 2) {
    const double u1 = uniformOpen(state);
    const double u2 = uniformOpen(state);
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[static_cast<Eigen::Index>(i)] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < dim_) {
      v[static_cast<Eigen::Index>(i + 1)] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
  }
  return v;
}

Eigen::VectorXd ToyHashEncoder::encode(std::string_view text) const {
  const auto tokens = annotation::tokenize(text);
  std::string sentence;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& tok : tokens) {
    v += hashedGaussian("w:" + tok);
    if (!sentence.empty()) {
      sentence.push_back(' ');
    }
    sentence += tok;
  }
  v += hashedGaussian("s:" + sentence);
  return v / v.norm();
}

std::string ToyHashEncoder::fingerprint() const {
  return "toy-hash:" + std::to_string(dim_) + ":" + std::to_string(seed_);
}

PrecomputedEncoder::PrecomputedEncoder(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(readTextFile(path));
    name_ = j.value("name", path.filename().string());
    dim_ = j.at("dim").get<std::size_t>();
    for (const auto& [text, vec] : j.at("embeddings").items()) {
      const auto values = vec.get<std::vector<double>>();
      if (values.size() != dim_) {
        throw Error(ErrorCode::kFormat, "embedding for '" + text + "' has wrong dimension", path.string());
      }
      table_.emplace(text, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(dim_)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("embedding table: ") + e.what(), path.string());
  }
}

Eigen::VectorXd PrecomputedEncoder::encode(std::string_view text) const {
  const auto it = table_.find(text);
  if (it == table_.end()) {
    throw Error(ErrorCode::kConfig, "text missing from precomputed embedding table", std::string(text));
  }
  return it->second;
}

std::string PrecomputedEncoder::fingerprint() const {
  return "pretrained:" + name_ + ":" + std::to_string(dim_);
}

std::unique_ptr<TextEncoder> makeTextEncoder(std::string_view spec) {
  constexpr std::string_view kToy = "toy-hash:";
  constexpr std::string_view kPretrained = "pretrained:";
  if (spec.starts_with(kToy)) {
    const std::string rest(spec.substr(kToy.size()));
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    try {
      const auto colon = rest.find(':');
      dim = std::stoul(rest.substr(0, colon));
      if (colon != std::string::npos) {
        seed = std::stoull(rest.substr(colon + 1));
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "bad encoder spec", std::string(spec));
    }
    return std::make_unique<ToyHashEncoder>(dim, seed);
  }
  if (spec.starts_with(kPretrained)) {
    return std::make_unique<PrecomputedEncoder>(std::filesystem::path(std::string(spec.substr(kPretrained.size()))));
  }
  throw Error(ErrorCode::kConfig, "unknown encoder (use toy-hash:<E> or pretrained:<path>)", std::string(spec));
}

}  // namespace partmotion::conditioning
