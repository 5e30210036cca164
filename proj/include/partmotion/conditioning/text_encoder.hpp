#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace partmotion::conditioning {

// Maps label text to a fixed-width embedding. Implementations are
// deterministic: identical text yields an identical vector.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual Eigen::VectorXd encode(std::string_view text) const = 0;
  // Identifies the encoder and its configuration, e.g. "toy-hash:128:0".
  virtual std::string fingerprint() const = 0;
};

// Seeded hashing encoder for tests and desk-scale runs. The embedding is the
// unit-normalized sum of one pseudo-random Gaussian vector per token plus one
// for the whole normalized sentence, so paraphrases sharing words are
// correlated and identical texts coincide.
class ToyHashEncoder final : public TextEncoder {
 public:
  explicit ToyHashEncoder(std::size_t dim, std::uint64_t seed = 0);

  std::size_t dim() const override {
    return dim_;
  }
  Eigen::VectorXd encode(std::string_view text) const override;
  std::string fingerprint() const override;

 private:
  Eigen::VectorXd hashedGaussian(std::string_view key) const;

  std::size_t dim_;
  std::uint64_t seed_;
};

// Embeddings computed offline by an external model, loaded from JSON:
//   {"name": "...", "dim": E, "embeddings": {"text": [E floats], ...}}
// Texts are looked up verbatim; an unknown text is a configuration error.
class PrecomputedEncoder final : public TextEncoder {
 public:
  explicit PrecomputedEncoder(const std::filesystem::path& path);

  std::size_t dim() const override {
    return dim_;
  }
  Eigen::VectorXd encode(std::string_view text) const override;
  std::string fingerprint() const override;

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::map<std::string, Eigen::VectorXd, std::less<>> table_;
};

// "toy-hash:<E>" or "pretrained:<path to embedding table>".
std::unique_ptr<TextEncoder> makeTextEncoder(std::string_view spec);

}  // namespace partmotion::conditioning
