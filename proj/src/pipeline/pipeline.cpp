#include "partmotion/pipeline/pipeline.hpp"

#include <set>

#include <algorithm>

#include "partmotion/motion/features.hpp"
#include "partmotion/motion/normalizer.hpp"

namespace partmotion::pipeline {

std::vector<eval::LabeledMotion> toLabeled(const std::vector<synth::SynthSample>& samples) {
  std::vector<eval::LabeledMotion> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({s.annotation, s.motion});
  }
  return out;
}

std::vector<std::string> conditioningLabels(const std::vector<annotation::HierarchicalAnnotation>& anns) {
  std::set<std::string> labels;
  auto add = [&](const annotation::Track& t) {
    for (const auto& seg : t) {
      if (!seg.label.isUnknown()) {
        labels.insert(seg.label.text());
      }
    }
  };
  for (const auto& a : anns) {
    add(a.actions);
    for (const auto& p : a.parts) {
      add(p);
    }
  }
  return {labels.begin(), labels.end()};
}

PreparedData prepareGeneratorData(const std::vector<eval::LabeledMotion>& train, const motion::Skeleton& skeleton,
                                  const std::string& encoderSpec, std::size_t pcaDim) {
  PreparedData data;
  data.encoderSpec = encoderSpec;
  data.encoder = conditioning::makeTextEncoder(encoderSpec);
  std::vector<annotation::HierarchicalAnnotation> anns;
  anns.reserve(train.size());
  for (const auto& t : train) {
    anns.push_back(t.annotation);
  }
  data.projector = conditioning::fitLabelPca(conditioningLabels(anns), *data.encoder, pcaDim);

  std::vector<nn::Mat> features;
  features.reserve(train.size());
  for (const auto& t : train) {
    features.push_back(motion::encodeFeatures(t.motion, skeleton).values);
  }
  std::vector<const nn::Mat*> corpus;
  for (const auto& f : features) {
    corpus.push_back(&f);
  }
  data.normalizer = motion::FeatureNormalizer::fit(corpus);

  const conditioning::LabelEmbedder embedder(*data.encoder, data.projector);
  data.samples.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    diffusion::TrainingSample s;
    s.id = train[i].annotation.id;
    s.features = std::move(features[i]);
    data.normalizer.apply(s.features);
    s.grid = conditioning::buildConditionGrid(train[i].annotation, embedder);
    data.samples.push_back(std::move(s));
  }
  return data;
}

diffusion::DenoiserConfig completeConfig(diffusion::DenoiserConfig config, const PreparedData& data) {
  config.featureDim = data.normalizer.dim();
  config.pcaDim = data.projector.outputDim();
  config.textDim = data.encoder->dim();
  for (const auto& s : data.samples) {
    config.maxFrames = std::max(config.maxFrames, s.features.rows());
  }
  return config;
}

diffusion::GeneratorCheckpoint makeCheckpoint(const PreparedData& data, const diffusion::Denoiser& model,
                                              const motion::Skeleton& skeleton, int diffusionSteps,
                                              nlohmann::json metadata) {
  diffusion::GeneratorCheckpoint ck;
  ck.model = model;
  ck.diffusionSteps = diffusionSteps;
  ck.normalizer = data.normalizer;
  ck.projector = data.projector;
  ck.encoderSpec = data.encoderSpec;
  ck.skeleton = skeleton;
  ck.metadata = std::move(metadata);
  return ck;
}

std::vector<eval::EvalSample> generateForSplit(const diffusion::MotionGenerator& generator,
                                               const std::vector<eval::LabeledMotion>& test, std::uint64_t seed) {
  std::vector<eval::EvalSample> out;
  out.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto gen = generator.generate(test[i].annotation, diffusion::deriveSeed(seed, i));
    out.push_back({test[i].annotation, test[i].motion, std::move(gen.motion)});
  }
  return out;
}

std::vector<eval::EvalSample> groundTruthSamples(const std::vector<eval::LabeledMotion>& test) {
  std::vector<eval::EvalSample> out;
  out.reserve(test.size());
  for (const auto& t : test) {
    out.push_back({t.annotation, t.motion, t.motion});
  }
  return out;
}

}  // namespace partmotion::pipeline
