#include "partmotion/eval/suite.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/motion/features.hpp"
#include "partmotion/nn/optimizer.hpp"

namespace partmotion::eval {
namespace {

constexpr const char* kMagic = "PMEVALMD";

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Pairs whose labels come from one annotation and crops from another motion.
struct LevelData {
  std::vector<RetrievalPair> generated;
  std::vector<RetrievalPair> groundTruth;
};

// Per-repeat batched R@1/R@3 over a fixed set of embeddings.
void batchedRecall(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text, const std::vector<std::string>& labels,
                   std::size_t batchSize, const FilterOracle& filter, std::mt19937_64& rng, double& r1, double& r3) {
  const auto n = static_cast<std::size_t>(motion.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  double hit1 = 0.0, hit3 = 0.0, counted = 0.0;
  for (std::size_t start = 0; start < n; start += batchSize) {
    const std::size_t len = std::min(batchSize, n - start);
    if (len < 4 && counted > 0.0) {
      break;  // a tiny trailing batch would inflate recall
    }
    Eigen::MatrixXd bm(static_cast<Eigen::Index>(len), motion.cols());
    Eigen::MatrixXd bt(static_cast<Eigen::Index>(len), text.cols());
    std::vector<std::string> bl(len);
    for (std::size_t k = 0; k < len; ++k) {
      const auto idx = static_cast<Eigen::Index>(order[start + k]);
      bm.row(static_cast<Eigen::Index>(k)) = motion.row(idx);
      bt.row(static_cast<Eigen::Index>(k)) = text.row(idx);
      bl[k] = labels[order[start + k]];
    }
    const auto r = recallAtK(bm, bt, bl, {1, 3}, &filter);
    hit1 += r[0] * static_cast<double>(len);
    hit3 += r[1] * static_cast<double>(len);
    counted += static_cast<double>(len);
  }
  r1 = counted > 0.0 ? hit1 / counted : 0.0;
  r3 = counted > 0.0 ? hit3 / counted : 0.0;
}

nlohmann::json summaryJson(const Summary& s) {
  return {{"mean", s.mean}, {"ci95", s.halfWidth}};
}

nlohmann::json levelJson(const LevelMetrics& m) {
  return {{"R@1", summaryJson(m.r1)}, {"R@3", summaryJson(m.r3)}, {"M2T", summaryJson(m.m2t)}, {"crops", m.crops}};
}

std::string cell(const Summary& s, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f±%.*f", precision, s.mean, precision, s.halfWidth);
  return buf;
}

}  // namespace

std::string levelName(std::size_t level) {
  if (level < annotation::kNumParts) {
    return std::string(annotation::partKey(annotation::kAllParts[level]));
  }
  return level == kActionLevel ? "action" : "sequence";
}

std::vector<RetrievalPair> levelPairs(std::size_t level, const annotation::HierarchicalAnnotation& ann,
                                      const nn::Mat& normalizedFeatures) {
  const annotation::Track* track = nullptr;
  if (level < annotation::kNumParts) {
    track = &ann.parts[level];
  } else if (level == kActionLevel) {
    track = &ann.actions;
  } else if (level == kSequenceLevel) {
    track = &ann.sequence;
  } else {
    throw Error(ErrorCode::kConfig, "level out of range");
  }
  std::vector<RetrievalPair> out;
  for (const auto& seg : *track) {
    if (seg.label.isUnknown() || seg.end > static_cast<int>(normalizedFeatures.rows())) {
      continue;
    }
    out.push_back({nn::sliceRows(normalizedFeatures, static_cast<std::size_t>(seg.start),
                                 static_cast<std::size_t>(seg.length())),
                   seg.label.text()});
  }
  return out;
}

nn::Mat EvaluationModels::features(const motion::MotionSequence& m) const {
  nn::Mat f = motion::encodeFeatures(m, skeleton).values;
  normalizer.apply(f);
  return f;
}

void EvaluationModels::save(const std::filesystem::path& path) {
  BinaryContainer c;
  c.magic = kMagic;
  c.version = 1;
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t l = 0; l < kNumLevels; ++l) {
    const auto params = models[l].parameters();
    entries.push_back({{"level", levelName(l)},
                       {"config", models[l].config().toJson()},
                       {"parameters", nn::paramShapes(params)},
                       {"count", nn::parameterCount(params)}});
    const auto flat = nn::flattenParams(params);
    c.payload.insert(c.payload.end(), flat.begin(), flat.end());
  }
  c.header = {{"kind", "retrieval-models"},
              {"encoder", encoderSpec},
              {"normalizer", normalizer.toJson()},
              {"skeleton", motion::skeletonToJson(skeleton)},
              {"models", entries}};
  writeContainer(path, c);
}

EvaluationModels EvaluationModels::load(const std::filesystem::path& path) {
  const BinaryContainer c = readContainer(path, kMagic);
  try {
    EvaluationModels out;
    out.encoderSpec = c.header.at("encoder").get<std::string>();
    out.normalizer = motion::FeatureNormalizer::fromJson(c.header.at("normalizer"));
    out.skeleton = motion::skeletonFromJson(c.header.at("skeleton"));
    const auto& entries = c.header.at("models");
    if (entries.size() != kNumLevels) {
      throw Error(ErrorCode::kFormat, "expected " + std::to_string(kNumLevels) + " retrieval models", path.string());
    }
    std::size_t offset = 0;
    for (std::size_t l = 0; l < kNumLevels; ++l) {
      out.models[l] = RetrievalModel(RetrievalConfig::fromJson(entries[l].at("config")), 0);
      const auto params = out.models[l].parameters();
      const std::size_t count = nn::parameterCount(params);
      if (nn::paramShapes(params) != entries[l].at("parameters") || offset + count > c.payload.size()) {
        throw Error(ErrorCode::kFormat, "retrieval model " + levelName(l) + " does not match its config",
                    path.string());
      }
      nn::unflattenParams(params, c.payload, offset);
      offset += count;
    }
    if (offset != c.payload.size()) {
      throw Error(ErrorCode::kFormat, "trailing payload in retrieval model file", path.string());
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("retrieval model header: ") + e.what(), path.string());
  }
}

EvaluationModels trainEvaluationModels(const std::vector<LabeledMotion>& data, const motion::Skeleton& skeleton,
                                       const std::string& encoderSpec, const EvalTrainConfig& config) {
  const auto encoder = conditioning::makeTextEncoder(encoderSpec);
  EvaluationModels out;
  out.encoderSpec = encoderSpec;
  out.skeleton = skeleton;

  std::vector<nn::Mat> features;
  features.reserve(data.size());
  for (const auto& d : data) {
    features.push_back(motion::encodeFeatures(d.motion, skeleton).values);
  }
  std::vector<const nn::Mat*> corpus;
  for (const auto& f : features) {
    corpus.push_back(&f);
  }
  out.normalizer = motion::FeatureNormalizer::fit(corpus);
  for (auto& f : features) {
    out.normalizer.apply(f);
  }

  RetrievalConfig modelCfg = config.model;
  modelCfg.featureDim = features.empty() ? modelCfg.featureDim : features.front().cols();
  modelCfg.textDim = encoder->dim();
  for (std::size_t l = 0; l < kNumLevels; ++l) {
    std::vector<RetrievalPair> pairs;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto p = levelPairs(l, data[i].annotation, features[i]);
      std::move(p.begin(), p.end(), std::back_inserter(pairs));
    }
    RetrievalTrainConfig trainCfg = config.train;
    trainCfg.seed = mixSeed(config.train.seed, l);
    try {
      out.models[l] = trainRetrievalModel(pairs, *encoder, modelCfg, trainCfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInsufficientData) {
        throw Error(ErrorCode::kInsufficientData, "not enough labeled crops for level " + levelName(l), e.what());
      }
      throw;
    }
  }
  return out;
}

double heldOutRecallAt1(const RetrievalModel& model, const std::vector<RetrievalPair>& pairs,
                        const conditioning::TextEncoder& encoder, std::size_t batchSize, std::size_t repeats,
                        std::uint64_t seed) {
  std::vector<const nn::Mat*> crops;
  std::vector<std::string> labels;
  for (const auto& p : pairs) {
    crops.push_back(&p.crop);
    labels.push_back(p.label);
  }
  const Eigen::MatrixXd m = model.embedMotions(crops);
  const Eigen::MatrixXd t = model.embedTexts(encodeLabels(labels, encoder));
  const FilterOracle exactOnly(encoder, 0.999999);
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (std::size_t r = 0; r < repeats; ++r) {
    double r1 = 0.0, r3 = 0.0;
    batchedRecall(m, t, labels, batchSize, exactOnly, rng, r1, r3);
    total += r1;
  }
  return total / static_cast<double>(std::max<std::size_t>(repeats, 1));
}

SuiteReport evaluateSuite(const std::vector<EvalSample>& samples, const EvaluationModels& models,
                          const SuiteConfig& config) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInsufficientData, "evaluation split is empty");
  }
  if (config.repeats == 0 || config.batchSize < 4) {
    throw Error(ErrorCode::kConfig, "evaluation needs repeats >= 1 and batch size >= 4");
  }
  const auto encoder = conditioning::makeTextEncoder(models.encoderSpec);
  const FilterOracle filter(*encoder, config.filterThreshold);

  std::array<LevelData, kNumLevels> levels;
  for (const auto& s : samples) {
    const nn::Mat gen = models.features(s.generated);
    const nn::Mat gt = models.features(s.groundTruth);
    for (std::size_t l = 0; l < kNumLevels; ++l) {
      auto g = levelPairs(l, s.annotation, gen);
      auto t = levelPairs(l, s.annotation, gt);
      std::move(g.begin(), g.end(), std::back_inserter(levels[l].generated));
      std::move(t.begin(), t.end(), std::back_inserter(levels[l].groundTruth));
    }
  }

  SuiteReport report;
  report.config = config;
  std::array<Eigen::MatrixXd, kNumLevels> genEmb, gtEmb, textEmb;
  std::array<std::vector<std::string>, kNumLevels> labels;
  std::array<double, kNumLevels> m2t{};
  for (std::size_t l = 0; l < kNumLevels; ++l) {
    std::vector<const nn::Mat*> gen, gt;
    for (const auto& p : levels[l].generated) {
      gen.push_back(&p.crop);
      labels[l].push_back(p.label);
    }
    for (const auto& p : levels[l].groundTruth) {
      gt.push_back(&p.crop);
    }
    if (gen.empty()) {
      continue;
    }
    genEmb[l] = models.models[l].embedMotions(gen);
    gtEmb[l] = models.models[l].embedMotions(gt);
    textEmb[l] = models.models[l].embedTexts(encodeLabels(labels[l], *encoder));
    m2t[l] = motionToText(genEmb[l], textEmb[l]);
  }

  std::array<std::vector<double>, kNumLevels> r1s, r3s, m2ts;
  std::vector<double> avgR1, avgR3, avgM2t;
  std::vector<double> fidAction, fidSequence, divAction, divSequence;
  for (std::size_t rep = 0; rep < config.repeats; ++rep) {
    std::mt19937_64 rng(mixSeed(config.seed, rep));
    double sumR1 = 0.0, sumR3 = 0.0, sumM2t = 0.0;
    std::size_t partsCounted = 0;
    for (std::size_t l = 0; l < kNumLevels; ++l) {
      if (genEmb[l].rows() < 2) {
        continue;
      }
      double r1 = 0.0, r3 = 0.0;
      batchedRecall(genEmb[l], textEmb[l], labels[l], config.batchSize, filter, rng, r1, r3);
      r1s[l].push_back(r1);
      r3s[l].push_back(r3);
      m2ts[l].push_back(m2t[l]);
      if (l < annotation::kNumParts) {
        sumR1 += r1;
        sumR3 += r3;
        sumM2t += m2t[l];
        ++partsCounted;
      }
    }
    if (partsCounted > 0) {
      avgR1.push_back(sumR1 / static_cast<double>(partsCounted));
      avgR3.push_back(sumR3 / static_cast<double>(partsCounted));
      avgM2t.push_back(sumM2t / static_cast<double>(partsCounted));
    }
    for (std::size_t l : {kActionLevel, kSequenceLevel}) {
      if (genEmb[l].rows() < 2) {
        continue;
      }
      const double f = fid(genEmb[l], gtEmb[l]);
      const double d = diversity(genEmb[l], config.diversityPairs, rng());
      (l == kActionLevel ? fidAction : fidSequence).push_back(f);
      (l == kActionLevel ? divAction : divSequence).push_back(d);
    }
  }

  auto level = [&](std::size_t l) {
    LevelMetrics m;
    m.r1 = summarize(r1s[l]);
    m.r3 = summarize(r3s[l]);
    m.m2t = summarize(m2ts[l]);
    m.crops = labels[l].size();
    return m;
  };
  std::size_t partCrops = 0;
  for (std::size_t k = 0; k < annotation::kNumParts; ++k) {
    report.parts[k] = level(k);
    partCrops += report.parts[k].crops;
  }
  report.avgPart = {summarize(avgR1), summarize(avgR3), summarize(avgM2t), partCrops};
  report.action = level(kActionLevel);
  report.sequence = level(kSequenceLevel);
  report.actionRealism = {summarize(fidAction), summarize(divAction)};
  report.sequenceRealism = {summarize(fidSequence), summarize(divSequence)};
  return report;
}

nlohmann::json SuiteReport::toJson() const {
  nlohmann::json parts = nlohmann::json::object();
  for (std::size_t k = 0; k < annotation::kNumParts; ++k) {
    parts[levelName(k)] = levelJson(this->parts[k]);
  }
  return {
      {"generator", config.generatorName},
      {"seed", config.seed},
      {"repeats", config.repeats},
      {"batch_size", config.batchSize},
      {"filter_threshold", config.filterThreshold},
      {"diversity_pairs", config.diversityPairs},
      {"avg_part", levelJson(avgPart)},
      {"parts", parts},
      {"per_action", levelJson(action)},
      {"per_sequence", levelJson(sequence)},
      {"action_realism", {{"FID", summaryJson(actionRealism.fid)}, {"Diversity", summaryJson(actionRealism.diversity)}}},
      {"sequence_realism",
       {{"FID", summaryJson(sequenceRealism.fid)}, {"Diversity", summaryJson(sequenceRealism.diversity)}}},
  };
}

std::string SuiteReport::table() const {
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof(line), "%-12s | %-41s | %-69s | %-69s\n", "", "Avg-part", "Per-action", "Per-sequence");
  os << line;
  std::snprintf(line, sizeof(line), "%-12s | %-13s %-13s %-13s | %-13s %-13s %-13s %-13s %-13s | %-13s %-13s %-13s %-13s %-13s\n",
                "Method", "R@1", "R@3", "M2T", "R@1", "R@3", "M2T", "FID", "Div", "R@1", "R@3", "M2T", "FID", "Div");
  os << line;
  std::snprintf(line, sizeof(line),
                "%-12s | %-13s %-13s %-13s | %-13s %-13s %-13s %-13s %-13s | %-13s %-13s %-13s %-13s %-13s\n",
                config.generatorName.substr(0, 12).c_str(), cell(avgPart.r1, 2).c_str(), cell(avgPart.r3, 2).c_str(),
                cell(avgPart.m2t, 3).c_str(), cell(action.r1, 2).c_str(), cell(action.r3, 2).c_str(),
                cell(action.m2t, 3).c_str(), cell(actionRealism.fid, 3).c_str(),
                cell(actionRealism.diversity, 3).c_str(), cell(sequence.r1, 2).c_str(), cell(sequence.r3, 2).c_str(),
                cell(sequence.m2t, 3).c_str(), cell(sequenceRealism.fid, 3).c_str(),
                cell(sequenceRealism.diversity, 3).c_str());
  os << line;
  return os.str();
}

}  // namespace partmotion::eval
