// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance --cli <path to partmotion> [--work DIR] [--only 1,5,7]
//              [--gen-steps N] [--quick]
//
// --quick shrinks the toy training run for local iteration; the verdicts for
// criteria 5 and 7 are only meaningful without it.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "partmotion/agent/agreement.hpp"
#include "partmotion/agent/annotator.hpp"
#include "partmotion/agent/backend.hpp"
#include "partmotion/agent/mock_backend.hpp"
#include "partmotion/annotation/annotation.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/conditioning/condition_grid.hpp"
#include "partmotion/conditioning/masking.hpp"
#include "partmotion/conditioning/pca.hpp"
#include "partmotion/conditioning/text_encoder.hpp"
#include "partmotion/diffusion/checkpoint.hpp"
#include "partmotion/diffusion/denoiser.hpp"
#include "partmotion/diffusion/schedule.hpp"
#include "partmotion/diffusion/trainer.hpp"
#include "partmotion/eval/metrics.hpp"
#include "partmotion/eval/suite.hpp"
#include "partmotion/motion/features.hpp"
#include "partmotion/motion/rotation.hpp"
#include "partmotion/motion/skeleton.hpp"
#include "partmotion/pipeline/pipeline.hpp"
#include "partmotion/synth/generator.hpp"
#include "partmotion/synth/splits.hpp"

namespace fs = std::filesystem;
using namespace partmotion;
using annotation::PartId;
using annotation::Rule;
using testutil::seg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string cli;
  fs::path work = fs::temp_directory_path() / "partmotion_acceptance";
  std::vector<int> only;
  std::size_t genSteps = 3000;
  bool quick = false;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// ------------------------------------------------------------------ 1

// Seeds one violation of the requested rule into a valid annotation and
// returns the (track, segment) it should be reported at, or nothing when the
// annotation has no room for that mutation.
std::optional<std::pair<std::string, int>> mutate(annotation::HierarchicalAnnotation& a, Rule rule,
                                                  std::mt19937_64& rng) {
  struct Site {
    annotation::Track* track;
    std::string name;
  };
  std::vector<Site> sites{{&a.actions, "actions"}};
  for (auto p : annotation::kAllParts) sites.push_back({&a.part(p), std::string(annotation::partKey(p))});
  std::shuffle(sites.begin(), sites.end(), rng);
  for (auto& site : sites) {
    auto& t = *site.track;
    if (rule == Rule::kOutOfRange) {
      t.back().end = a.numFrames + 1 + static_cast<int>(rng() % 20);
      return std::make_pair(site.name, static_cast<int>(t.size() - 1));
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (rule == Rule::kOverlap && t[i - 1].length() >= 2) {
        t[i].start -= 1 + static_cast<int>(rng() % static_cast<unsigned>(t[i - 1].length() - 1));
        return std::make_pair(site.name, static_cast<int>(i));
      }
      if (rule == Rule::kGap && t[i].length() >= 2) {
        t[i].start += 1 + static_cast<int>(rng() % static_cast<unsigned>(t[i].length() - 1));
        return std::make_pair(site.name, static_cast<int>(i));
      }
    }
  }
  return std::nullopt;
}

Outcome schemaSuite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  int validPass = 0, rejected = 0, mutants = 0;
  const Rule rules[] = {Rule::kOverlap, Rule::kGap, Rule::kOutOfRange};
  for (int i = 0; i < 1000; ++i) {
    validPass += annotation::isValid(testutil::randomAnnotation(rng, "valid")) ? 1 : 0;
  }
  while (mutants < 1000) {
    auto a = testutil::randomAnnotation(rng, "mutant");
    const Rule rule = rules[mutants % 3];
    const auto site = mutate(a, rule, rng);
    if (!site) continue;
    ++mutants;
    for (const auto& v : annotation::validateAnnotation(a)) {
      if (v.rule == rule && v.track == site->first && v.segment == site->second) {
        ++rejected;
        break;
      }
    }
  }
  const double secs = seconds(t0);
  return {validPass == 1000 && rejected == 1000 && secs < 10.0,
          fmt("%d/1000 valid accepted, %d/1000 mutants rejected with the seeded rule, %.2f s", validPass, rejected,
              secs)};
}

// ------------------------------------------------------------------ 2

Outcome representationRoundTrip() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& skel = motion::toySkeleton();
  const auto data = synth::synthesizeDataset(synth::defaultLibrary(), {}, 100, 202);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi), shift(-10.0, 10.0);
  double worstPos = 0.0, worstInv = 0.0;
  for (const auto& s : data) {
    const auto& m = s.motion;
    const auto f = motion::encodeFeatures(m, skel);
    const auto back = motion::decodeFeatures(f, skel, m.frames[0].rootPosition.head<2>(),
                                             motion::headingYaw(m.frames[0].rotations[0]));
    for (std::size_t t = 0; t < m.numFrames(); ++t) {
      const auto a = motion::forwardKinematics(skel, m.frames[t]);
      const auto b = motion::forwardKinematics(skel, back.motion.frames[t]);
      for (std::size_t j = 0; j < a.size(); ++j) worstPos = std::max(worstPos, (a[j] - b[j]).norm());
    }
    const auto g = motion::encodeFeatures(motion::rotateAboutZ(m, angle(rng), motion::Vec2(shift(rng), shift(rng))),
                                          skel);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      worstInv = std::max(worstInv, std::abs(f.values.values()[i] - g.values.values()[i]));
    }
  }
  double worstRot = 0.0;
  std::normal_distribution<double> n;
  for (int i = 0; i < 10000; ++i) {
    const motion::Mat3 r = motion::axisAngle(motion::Vec3(n(rng), n(rng), n(rng)).normalized(), angle(rng));
    worstRot = std::max(worstRot, (motion::decodeRot6d(motion::encodeRot6d(r)) - r).cwiseAbs().maxCoeff());
  }
  const double secs = seconds(t0);
  return {worstPos <= 1e-4 && worstRot <= 1e-6 && worstInv <= 1e-6 && secs < 30.0,
          fmt("joint error %.2e m, 6D error %.2e, invariance %.2e, %.2f s", worstPos, worstRot, worstInv, secs)};
}

// ------------------------------------------------------------------ 3

Outcome maskingStatistics() {
  conditioning::MaskingConfig cfg;
  cfg.targetRate = 0.5;
  std::mt19937_64 rng(303);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += conditioning::drawPartDropProbability(cfg, rng);
  const double mean = sum / 10000.0;

  conditioning::ToyHashEncoder enc(64);
  const auto data = synth::synthesizeDataset(synth::defaultLibrary(), {}, 40, 303);
  std::vector<annotation::HierarchicalAnnotation> anns;
  for (const auto& s : data) anns.push_back(s.annotation);
  const auto labels = pipeline::conditioningLabels(anns);
  const auto projector = conditioning::fitLabelPca(labels, enc, 16);
  const conditioning::LabelEmbedder embedder(enc, projector);

  bool zeroed = true, kept = true, reproducible = true;
  std::size_t droppedCells = 0;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const auto grid = conditioning::buildConditionGrid(anns[i], embedder);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto masked = conditioning::applyStochasticMasking(grid, cfg, seed * 977 + i);
      reproducible &= masked == conditioning::applyStochasticMasking(grid, cfg, seed * 977 + i);
      const std::size_t D = grid.pcaDim;
      for (std::size_t t = 0; t < grid.numFrames; ++t) {
        for (std::size_t c = 0; c < annotation::kGridColumns; ++c) {
          const bool isAction = c == annotation::kActionColumn;
          const auto& src = isAction ? grid.actionFeatures : grid.partFeatures;
          const auto& dst = isAction ? masked.actionFeatures : masked.partFeatures;
          const std::size_t col0 = isAction ? 0 : c * D;
          const bool dropped = grid.isKnown(t, c) && !masked.isKnown(t, c);
          droppedCells += dropped ? 1 : 0;
          for (std::size_t k = 0; k < D; ++k) {
            if (!masked.isKnown(t, c)) {
              zeroed &= dst(t, col0 + k) == 0.0;
            } else {
              kept &= dst(t, col0 + k) == src(t, col0 + k);
            }
          }
        }
      }
      if (!masked.sequenceKnown) {
        for (double v : masked.sequenceEmbedding) zeroed &= v == 0.0;
      }
    }
  }
  return {mean >= 0.48 && mean <= 0.52 && zeroed && kept && reproducible && droppedCells > 0,
          fmt("mean p %.4f, masked blocks zero: %s, surviving blocks intact: %s, reproducible: %s", mean,
              zeroed ? "yes" : "no", kept ? "yes" : "no", reproducible ? "yes" : "no")};
}

// ------------------------------------------------------------------ 4

Outcome diffusionAlgebra() {
  const diffusion::NoiseSchedule sched(100);
  bool decreasing = true;
  for (int s = 1; s <= 100; ++s) decreasing &= sched.alphaBar(s) < sched.alphaBar(s - 1);
  const bool ends = sched.alphaBar(0) == 1.0 && sched.alphaBar(100) < 1e-3;

  std::mt19937_64 rng(404);
  std::normal_distribution<double> n;
  double worstMoment = 0.0;
  for (int sigma : {10, 50, 90}) {
    const double x0 = 1.3, ab = sched.alphaBar(sigma);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double v = diffusion::qSample(nn::Mat(1, 1, x0), sigma, nn::Mat(1, 1, n(rng)), sched)(0, 0);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / 1e4, var = sq / 1e4 - mean * mean;
    worstMoment = std::max({worstMoment, std::abs(mean - std::sqrt(ab) * x0) / (std::sqrt(ab) * x0),
                            std::abs(var - (1 - ab)) / (1 - ab)});
  }

  conditioning::ToyHashEncoder enc(16);
  std::vector<std::string> labels;
  for (int i = 0; i < 12; ++i) labels.push_back("label " + std::to_string(i));
  const auto projector = conditioning::fitLabelPca(labels, enc, 4);
  const conditioning::LabelEmbedder embedder(enc, projector);
  auto ann = testutil::simpleAnnotation(6, "label 1", {seg("label 2", 0, 3), seg("label 3", 3, 6)});
  ann.part(PartId::kLeftArm) = {seg("label 4", 0, 6)};
  const auto grid = conditioning::buildConditionGrid(ann, embedder);
  diffusion::DenoiserConfig cfg;
  cfg.featureDim = 7;
  cfg.pcaDim = 4;
  cfg.textDim = 16;
  cfg.width = 16;
  cfg.depth = 2;
  cfg.heads = 2;
  cfg.dropout = 0.0;
  cfg.maxFrames = 8;
  diffusion::Denoiser model(cfg, 404);
  nn::Mat x(6, 7), w(6, 7);
  for (auto& v : x.values()) v = n(rng);
  for (auto& v : w.values()) v = n(rng);
  auto loss = [&] {
    const auto y = model.forward(grid, x, 33);
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) l += y.values()[i] * w.values()[i];
    return l;
  };
  auto params = model.parameters();
  nn::zeroGrads(params);
  diffusion::DenoiserCache cache;
  model.forward(grid, x, 33, &cache);
  model.backward(w, cache);
  double worstRel = 0.0;
  std::size_t checked = 0;
  for (auto* p : params) {
    // A handful of entries from every parameter tensor.
    for (std::size_t k = 0; k < p->value.size(); k += std::max<std::size_t>(1, p->value.size() / 5)) {
      const double orig = p->value.values()[k], h = 1e-4;
      p->value.values()[k] = orig + h;
      const double up = loss();
      p->value.values()[k] = orig - h;
      const double down = loss();
      p->value.values()[k] = orig;
      const double numeric = (up - down) / (2 * h), analytic = p->grad.values()[k];
      worstRel = std::max(worstRel, std::abs(numeric - analytic) / std::max(1e-6, std::abs(numeric) + std::abs(analytic)));
      ++checked;
    }
  }
  return {decreasing && ends && worstMoment < 0.02 && worstRel < 1e-3,
          fmt("alpha_bar(100) %.2e, decreasing: %s, worst moment error %.4f (variance standard error at 10k draws %.4f), worst gradient rel. error %.2e over %zu "
              "entries",
              sched.alphaBar(100), decreasing ? "yes" : "no", worstMoment, std::sqrt(2.0 / 1e4), worstRel, checked)};
}

// ------------------------------------------------------------------ 5 and 7

struct ToyRun {
  std::vector<eval::LabeledMotion> train, test;
  std::unique_ptr<pipeline::PreparedData> data;
  std::unique_ptr<diffusion::MotionGenerator> trained, untrained;
  std::vector<double> losses;
  double trainSeconds = 0.0;
};

constexpr const char* kEncoder = "toy-hash:128";

ToyRun& toyRun(const Options& opt) {
  static std::optional<ToyRun> run;
  if (run) return *run;
  run.emplace();
  const auto& skel = motion::toySkeleton();
  const std::size_t count = opt.quick ? 300 : 2000;
  const auto samples = synth::synthesizeDataset(synth::defaultLibrary(), {}, count, 505);
  std::vector<std::string> ids;
  for (const auto& s : samples) ids.push_back(s.annotation.id);
  const auto split = synth::buildDatasetSplits(ids, 505);
  const std::set<std::string> testIds(split.test.begin(), split.test.end());
  const std::set<std::string> trainIds(split.train.begin(), split.train.end());
  for (auto& lm : pipeline::toLabeled(samples)) {
    if (trainIds.count(lm.annotation.id)) run->train.push_back(lm);
    if (testIds.count(lm.annotation.id)) run->test.push_back(lm);
  }

  run->data = std::make_unique<pipeline::PreparedData>(pipeline::prepareGeneratorData(run->train, skel, kEncoder, 32));
  diffusion::DenoiserConfig cfg;
  cfg.width = 64;
  cfg.depth = 2;
  cfg.heads = 4;
  cfg = pipeline::completeConfig(cfg, *run->data);
  const diffusion::NoiseSchedule schedule(100);
  diffusion::Denoiser initial(cfg, 1);
  diffusion::Denoiser model = initial;
  diffusion::TrainerConfig tc;
  tc.steps = opt.quick ? 200 : opt.genSteps;
  tc.batchSize = 32;
  tc.optimizer.learningRate = 1e-3;
  tc.logEvery = 1;
  tc.seed = 2;
  diffusion::DiffusionTrainer trainer(model, schedule, tc);
  std::printf("       training toy generator: %zu sequences, %zu steps\n", run->data->samples.size(), tc.steps);
  std::fflush(stdout);
  const auto t0 = std::chrono::steady_clock::now();
  const auto records = trainer.run(run->data->samples, [&](const diffusion::StepRecord& r) {
    if (r.step % 500 == 0) {
      std::printf("       step %zu loss %.4f (%.0f s)\n", r.step, r.loss, seconds(t0));
      std::fflush(stdout);
    }
  });
  run->trainSeconds = seconds(t0);
  for (const auto& r : records) run->losses.push_back(r.loss);
  run->trained = std::make_unique<diffusion::MotionGenerator>(pipeline::makeCheckpoint(*run->data, model, skel, 100));
  run->untrained =
      std::make_unique<diffusion::MotionGenerator>(pipeline::makeCheckpoint(*run->data, initial, skel, 100));
  return *run;
}

annotation::HierarchicalAnnotation raiseLeftArmPrompt(int T) {
  annotation::HierarchicalAnnotation a;
  a.id = "raise_left_arm";
  a.numFrames = T;
  a.fps = 20.0;
  a.part(PartId::kLeftArm) = {seg("raise left arm", 0, T)};
  return annotation::fillUnknownGaps(a);
}

Outcome toyTraining(const Options& opt) {
  auto& run = toyRun(opt);
  const auto smooth = diffusion::smoothLosses(run.losses);
  if (smooth.size() < 100) return {false, "fewer than 100 training steps recorded"};
  const double at100 = smooth[99], last = smooth.back();
  const bool lossOk = last < 0.5 * at100;

  // Threshold calibration: ground-truth clips of the same prompt.
  const auto& lib = synth::defaultLibrary();
  const auto& skel = motion::toySkeleton();
  const int T = 120;
  double gtMin = 1e9;
  const auto& def = lib.atomic("raise_left_arm");
  for (double amp : {def.minAmplitude, def.maxAmplitude}) {
    std::array<std::vector<synth::AtomicInstance>, annotation::kNumParts> inst;
    for (auto p : annotation::kAllParts) inst[annotation::index(p)] = {{-1, 0.0, 0, T}};
    inst[annotation::index(PartId::kLeftArm)] = {{lib.atomicIndex("raise_left_arm"), amp, 0, T}};
    gtMin = std::min(gtMin, synth::elbowHeightGain(synth::renderInstances(lib, inst, T, 20.0), skel, true));
  }
  constexpr double kThreshold = 0.1;

  const auto prompt = raiseLeftArmPrompt(T);
  int passed = 0;
  std::string gains;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = synth::elbowHeightGain(run.trained->generate(prompt, seed).motion, skel, true);
    passed += g > kThreshold ? 1 : 0;
    gains += fmt("%s%.3f", seed == 0 ? "" : " ", g);
  }
  return {lossOk && passed >= 8 && gtMin > kThreshold,
          fmt("smoothed loss %.4f at step 100 -> %.4f at step %zu (ratio %.3f); raise left arm above %.2f m on %d/10 "
              "seeds [%s]; ground truth gain >= %.3f; training %.0f s",
              at100, last, run.losses.size(), last / at100, kThreshold, passed, gains.c_str(), gtMin,
              run.trainSeconds)};
}

Outcome retrievalSanity(const Options& opt) {
  auto& run = toyRun(opt);
  const auto& skel = motion::toySkeleton();
  eval::EvalTrainConfig cfg;
  cfg.train.seed = 7;
  if (opt.quick) cfg.train.minPairs = 20;
  const auto t0 = std::chrono::steady_clock::now();
  const auto models = eval::trainEvaluationModels(run.train, skel, kEncoder, cfg);
  const auto encoder = conditioning::makeTextEncoder(kEncoder);

  bool heldOutOk = true;
  std::string perPart;
  for (auto part : annotation::kAllParts) {
    const auto l = annotation::index(part);
    std::vector<eval::RetrievalPair> pairs;
    for (const auto& lm : run.test) {
      for (auto& p : eval::levelPairs(l, lm.annotation, models.features(lm.motion))) pairs.push_back(std::move(p));
    }
    const double r1 = eval::heldOutRecallAt1(models.models[l], pairs, *encoder, 32, 20, 70 + l);
    heldOutOk &= r1 >= 9.4;
    perPart += fmt("%s%s %.1f", perPart.empty() ? "" : ", ", std::string(annotation::partKey(part)).c_str(), r1);
  }

  eval::SuiteConfig suite;
  suite.seed = 8;
  const auto trainedReport = eval::evaluateSuite(pipeline::generateForSplit(*run.trained, run.test, 9), models, suite);
  const auto untrainedReport =
      eval::evaluateSuite(pipeline::generateForSplit(*run.untrained, run.test, 9), models, suite);
  const double a = trainedReport.avgPart.r1.mean, b = untrainedReport.avgPart.r1.mean;
  return {heldOutOk && a > b,
          fmt("held-out part R@1 %% [%s]; avg-part R@1 trained %.2f vs untrained %.2f; %.0f s", perPart.c_str(), a, b,
              seconds(t0))};
}

// ------------------------------------------------------------------ 6

Outcome evaluationOracles(const Options& opt) {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> n;
  auto rows = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    m.rowwise().normalize();
    return m;
  };
  const auto A = rows(300, 16);
  const double fidSelf = std::abs(eval::fid(A, A));
  const double fidShift = eval::fidFromStats({Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)},
                                             {Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Identity(1, 1)});

  std::vector<std::string> labels;
  for (int i = 0; i < 32; ++i) labels.push_back("text " + std::to_string(i));
  double sum = 0.0;
  bool monotone = true;
  for (int t = 0; t < 10000; ++t) {
    const auto r = eval::recallAtK(rows(32, 16), rows(32, 16), labels, {1, 3});
    sum += r[0];
    monotone &= r[0] <= r[1];
  }
  const double chance = sum / 10000.0;

  // Ground truth against itself through the full suite.
  const auto& skel = motion::toySkeleton();
  const auto data =
      pipeline::toLabeled(synth::synthesizeDataset(synth::defaultLibrary(), {}, opt.quick ? 150 : 400, 606));
  eval::EvalTrainConfig cfg;
  cfg.train.steps = 100;
  cfg.train.minPairs = 20;
  const auto models = eval::trainEvaluationModels(data, skel, kEncoder, cfg);
  eval::SuiteConfig suite;
  suite.repeats = 5;
  const auto report = eval::evaluateSuite(pipeline::groundTruthSamples(data), models, suite);
  const double gtFid = std::max(report.actionRealism.fid.mean, report.sequenceRealism.fid.mean);
  return {fidSelf <= 1e-8 && std::abs(fidShift - 1.0) <= 1e-6 && chance >= 2.1 && chance <= 4.1 && monotone &&
              gtFid < 0.01,
          fmt("FID(A,A) %.1e, unit shift %.8f, random R@1 %.3f%%, R@1<=R@3: %s, GT-vs-GT FID %.2e", fidSelf, fidShift,
              chance, monotone ? "yes" : "no", gtFid)};
}

// ------------------------------------------------------------------ 8

Outcome agreementOracle() {
  const double a = agent::gwetAc1({{{1, 1}, {1, 0}, {0, 0}, {1, 1}}});
  const double b = agent::gwetAc1({{{1, 0}, {0, 1}}});
  agent::RatingsTable unanimous;
  unanimous.rows.assign(20, {1, 1, 1});
  const double c = agent::gwetAc1(unanimous);
  const double expectedA = (0.75 - 0.46875) / (1.0 - 0.46875);
  return {std::abs(a - expectedA) < 1e-12 && std::abs(b + 1.0) < 1e-12 && c == 1.0,
          fmt("AC1 %.6f (expected %.6f), %.6f (expected -1), unanimous %.6f", a, expectedA, b, c)};
}

// ------------------------------------------------------------------ 9

Outcome agentPipeline() {
  const auto data = synth::synthesizeDataset(synth::defaultLibrary(), {}, 100, 909);
  agent::MockBackend mock(agent::defaultRuleTable());
  agent::Annotator annotator(mock, agent::AnnotatorConfig{});
  std::vector<agent::AgentRequest> requests;
  for (const auto& s : data) requests.push_back(agent::requestFromAnnotation(s.annotation));
  int valid = 0;
  for (const auto& o : annotator.annotateBatch(requests)) {
    valid += o.annotation && annotation::isValid(*o.annotation) ? 1 : 0;
  }

  agent::AgentRequest odd;
  odd.id = "odd";
  odd.numFrames = 80;
  odd.sequence = {seg("a person zorbulates", 0, 80)};
  odd.actions = {seg("zorbulate", 0, 40), seg("flibber wildly", 40, 80)};
  const auto ann = annotator.annotate(odd);
  bool allUnknown = annotation::isValid(ann);
  for (const auto& track : ann.parts)
    for (const auto& s : track) allUnknown &= s.label.isUnknown();

  agent::ScriptedBackend garbage({"definitely not json"});
  agent::AnnotatorConfig cfg;
  cfg.maxAttempts = 3;
  agent::Annotator failing(garbage, cfg);
  bool exhausted = false;
  try {
    failing.annotate(odd);
  } catch (const Error& e) {
    exhausted = e.code() == ErrorCode::kExhaustedRetries;
  }
  return {valid == 100 && allUnknown && exhausted && garbage.calls() == 3,
          fmt("%d/100 mock annotations valid, unrecognized verbs all unknown: %s, garbage backend: %s after %zu calls",
              valid, allUnknown ? "yes" : "no", exhausted ? "EXHAUSTED_RETRIES" : "no error",
              static_cast<std::size_t>(garbage.calls()))};
}

// ------------------------------------------------------------------ 10

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome cliReproducibility(const Options& opt) {
  if (opt.cli.empty()) return {false, "no --cli binary given"};
  const fs::path root = opt.work / "cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "run.toml";
  {
    std::ofstream f(config);
    f << "seed = 1234\nquiet = true\n"
         "[synth]\ncount = 120\nout = \"data\"\n"
         "[train-gen]\ndata = \"data\"\nout = \"gen.ck\"\nencoder = \"toy-hash:64\"\npca-dim = 16\nwidth = 32\n"
         "depth = 1\nheads = 2\nsteps = 20\nbatch = 8\ndiffusion-steps = 20\n"
         "[train-eval]\ndata = \"data\"\nout = \"eval.bin\"\nencoder = \"toy-hash:64\"\nhidden = 32\n"
         "embed-dim = 16\nsteps = 20\nmin-pairs = 5\n"
         "[sample]\ncheckpoint = \"gen.ck\"\nseq = \"a person raises the left arm\"\n"
         "part = [\"LEFT_ARM:raise left arm:0:40\"]\nout = \"sample.json\"\n"
         "[evaluate]\ncheckpoint = \"gen.ck\"\nmodels = \"eval.bin\"\ndata = \"data\"\nrepeats = 3\n"
         "diversity-pairs = 20\nout = \"report.json\"\nsamples-out = \"generated.pmm\"\n";
  }
  const std::vector<std::string> outputs = {"sample.json", "generated.pmm", "report.json", "gen.ck"};
  std::vector<std::vector<std::string>> runs;
  for (const char* name : {"a", "b"}) {
    const fs::path dir = root / name;
    fs::create_directories(dir);
    for (const char* sub : {"synth", "train-gen", "train-eval", "sample", "evaluate"}) {
      const std::string cmd = "cd '" + dir.string() + "' && '" + opt.cli + "' --config '" + config.string() + "' " + sub;
      if (std::system(cmd.c_str()) != 0) return {false, std::string("command failed: ") + cmd};
    }
    std::vector<std::string> contents;
    for (const auto& o : outputs) contents.push_back(slurp(dir / o));
    runs.push_back(std::move(contents));
  }
  std::string detail;
  bool same = true;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const bool eq = !runs[0][i].empty() && runs[0][i] == runs[1][i];
    same &= eq;
    detail += fmt("%s%s %s (%zu bytes)", i == 0 ? "" : ", ", outputs[i].c_str(), eq ? "identical" : "DIFFERS",
                  runs[0][i].size());
  }
  return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Acceptance checks"};
  app.add_option("--cli", opt.cli, "partmotion executable");
  app.add_option("--work", opt.work, "Scratch directory");
  app.add_option("--only", opt.only, "Criteria to run")->delimiter(',');
  app.add_option("--gen-steps", opt.genSteps, "Toy generator training steps");
  app.add_flag("--quick", opt.quick, "Smaller toy run (criteria 5 and 7 not meaningful)");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(opt.work);
  if (!opt.cli.empty()) opt.cli = fs::absolute(opt.cli).string();

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "schema suite", schemaSuite},
      {2, "representation round trip", representationRoundTrip},
      {3, "masking statistics", maskingStatistics},
      {4, "schedule and diffusion algebra", diffusionAlgebra},
      {5, "toy training", [&] { return toyTraining(opt); }},
      {6, "evaluation oracles", [&] { return evaluationOracles(opt); }},
      {7, "retrieval sanity", [&] { return retrievalSanity(opt); }},
      {8, "AC1 oracle", agreementOracle},
      {9, "agent pipeline", agentPipeline},
      {10, "CLI reproducibility", [&] { return cliReproducibility(opt); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end()) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
