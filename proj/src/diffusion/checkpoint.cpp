#include "partmotion/diffusion/checkpoint.hpp"

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/diffusion/sampler.hpp"
#include "partmotion/motion/features.hpp"
#include "partmotion/nn/optimizer.hpp"

namespace partmotion::diffusion {
namespace {
constexpr const char* kMagic = "PMDIFFCK";
}

void GeneratorCheckpoint::save(const std::filesystem::path& path) {
  BinaryContainer c;
  c.magic = kMagic;
  c.version = kCheckpointVersion;
  const auto params = model.parameters();
  c.header = {
      {"kind", "diffusion-generator"},
      {"config", model.config().toJson()},
      {"diffusion_steps", diffusionSteps},
      {"normalizer", normalizer.toJson()},
      {"projector", projector.toJson()},
      {"projector_fingerprint", projector.fingerprint()},
      {"encoder", encoderSpec},
      {"skeleton", motion::skeletonToJson(skeleton)},
      {"metadata", metadata},
      {"parameters", nn::paramShapes(params)},
  };
  c.payload = nn::flattenParams(params);
  writeContainer(path, c);
}

GeneratorCheckpoint GeneratorCheckpoint::load(const std::filesystem::path& path) {
  const BinaryContainer c = readContainer(path, kMagic);
  if (c.version != kCheckpointVersion) {
    throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(c.version), path.string());
  }
  try {
    GeneratorCheckpoint ck;
    ck.model = Denoiser(DenoiserConfig::fromJson(c.header.at("config")), 0);
    ck.diffusionSteps = c.header.at("diffusion_steps").get<int>();
    ck.normalizer = motion::FeatureNormalizer::fromJson(c.header.at("normalizer"));
    ck.projector = conditioning::PcaProjector::fromJson(c.header.at("projector"));
    if (ck.projector.fingerprint() != c.header.at("projector_fingerprint").get<std::string>()) {
      throw Error(ErrorCode::kFormat, "projector fingerprint mismatch", path.string());
    }
    ck.encoderSpec = c.header.at("encoder").get<std::string>();
    ck.skeleton = motion::skeletonFromJson(c.header.at("skeleton"));
    ck.metadata = c.header.value("metadata", nlohmann::json::object());
    const auto params = ck.model.parameters();
    if (nn::paramShapes(params) != c.header.at("parameters")) {
      throw Error(ErrorCode::kFormat, "parameter shapes do not match the config", path.string());
    }
    if (nn::parameterCount(params) != c.payload.size()) {
      throw Error(ErrorCode::kFormat, "payload size does not match parameter count", path.string());
    }
    nn::unflattenParams(params, c.payload);
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("checkpoint header: ") + e.what(), path.string());
  }
}

MotionGenerator::MotionGenerator(GeneratorCheckpoint checkpoint)
    : checkpoint_(std::move(checkpoint)),
      encoder_(conditioning::makeTextEncoder(checkpoint_.encoderSpec)),
      schedule_(checkpoint_.diffusionSteps) {
  if (checkpoint_.projector.encoderFingerprint != encoder_->fingerprint()) {
    throw Error(ErrorCode::kConfig, "checkpoint projector was fitted with a different text encoder",
                checkpoint_.projector.encoderFingerprint + " vs " + encoder_->fingerprint());
  }
  embedder_ = std::make_unique<conditioning::LabelEmbedder>(*encoder_, checkpoint_.projector);
}

GeneratedMotion MotionGenerator::generate(const annotation::HierarchicalAnnotation& ann, std::uint64_t seed) const {
  const conditioning::ConditionGrid grid = conditioning::buildConditionGrid(ann, *embedder_);
  GeneratedMotion out;
  out.normalizedFeatures = ddpmSample(checkpoint_.model, schedule_, grid, seed);
  motion::PoseFeatureMatrix features{ann.fps, out.normalizedFeatures};
  checkpoint_.normalizer.invert(features.values);
  out.motion = motion::decodeFeatures(features, checkpoint_.skeleton).motion;
  out.motion.fps = ann.fps;
  out.annotation = ann;
  return out;
}

}  // namespace partmotion::diffusion
